//! Flat key/value run configuration: file values first, command-line
//! values on top.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use planarcav::setup::{parse_key_values, SETUP_KEYS};
use planarcav::PhysicalSetup;

use crate::error::CliError;

pub const OUTPUT_KEYS: [&str; 3] = ["output.dir", "output.format", "run.threads"];

pub const COMMAND_KEYS: [&str; 25] = [
    "formfactor.kind",
    "formfactor.waist_um",
    "formfactor.f_over_wc",
    "formfactor.u_from",
    "formfactor.u_to",
    "formfactor.method",
    "formfactor.profile",
    "triplet.profile",
    "triplet.waist_um",
    "triplet.f_over_wc",
    "triplet.peak",
    "triplet.gamma_u",
    "sweep.axis",
    "sweep.odd",
    "sweep.from_um",
    "sweep.to_um",
    "sweep.points",
    "profile.kind",
    "profile.waist_um",
    "profile.f_over_wc",
    "profile.k_max",
    "profile.k_points",
    "profile.theta_points",
    "pulse.bandwidth_mhz",
    "selftest.seed",
];

pub fn known_key(key: &str) -> bool {
    SETUP_KEYS.contains(&key) || OUTPUT_KEYS.contains(&key) || COMMAND_KEYS.contains(&key)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::Config(format!("unknown output format '{other}' (expected csv, json or svg)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Reads `path` (if any), then applies `overrides`. Unknown keys are rejected.
    pub fn load(path: Option<&Path>, overrides: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut values = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
                parse_key_values(&text).map_err(|e| CliError::Config(e.to_string()))?
            }
            None => BTreeMap::new(),
        };
        values.extend(overrides);
        if let Some(bad) = values.keys().find(|k| !known_key(k)) {
            return Err(CliError::Config(format!("unknown configuration key '{bad}'")));
        }
        let out_dir = PathBuf::from(values.get("output.dir").map(String::as_str).unwrap_or("planarcav-out"));
        let mut formats = match values.get("output.format") {
            Some(s) => s.split(',').map(Format::from_str).collect::<Result<Vec<_>, _>>()?,
            None => vec![Format::Csv],
        };
        formats.sort();
        formats.dedup();
        if formats.is_empty() {
            return Err(CliError::Config("no output format selected".into()));
        }
        let threads = match values.get("run.threads") {
            Some(s) => match s.parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => return Err(CliError::Config(format!("run.threads must be a positive integer, got '{s}'"))),
            },
            None => None,
        };
        Ok(Self { values, out_dir, formats, threads })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn setup(&self) -> Result<PhysicalSetup, CliError> {
        let setup_only: BTreeMap<String, String> =
            self.values.iter().filter(|(k, _)| SETUP_KEYS.contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();
        PhysicalSetup::from_config(&setup_only).map_err(CliError::from)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("cannot parse {key} = '{s}'"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// File path for `name` inside the output directory.
    pub fn output_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Parses "a..b" as an inclusive range of odd integers.
pub fn parse_odd_range(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Config(format!("expected an odd range like 1..29, got '{s}'"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    let list: Vec<u32> = (a..=b).filter(|n| n % 2 == 1).collect();
    if list.is_empty() {
        return Err(CliError::Config(format!("range '{s}' contains no odd integers")));
    }
    Ok(list)
}
