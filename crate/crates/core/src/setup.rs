//! Physical constants, atom and cavity specifications, and the bridge between
//! SI quantities and the reduced frequency `u = ω/ω_c` used internally.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest leak parameter accepted; the leaky-mirror expansion needs τ ≪ 1.
pub const TAU_MAX: f64 = 0.01;

/// The leak parameter used throughout unless configured otherwise.
pub const DEFAULT_TAU: f64 = 1.0e-3;

/// CODATA-2018 values in SI units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Speed of light [m/s].
    pub c: f64,
    /// Reduced Planck constant [J s].
    pub hbar: f64,
    /// Vacuum permittivity [F/m].
    pub epsilon0: f64,
    /// Elementary charge [C].
    pub elementary_charge: f64,
    /// Bohr radius [m].
    pub bohr_radius: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        c: 299_792_458.0,
        hbar: 1.054_571_817e-34,
        epsilon0: 8.854_187_812_8e-12,
        elementary_charge: 1.602_176_634e-19,
        bohr_radius: 5.291_772_109_03e-11,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Orientation of the atomic transition dipole. Only dipoles lying in the
/// mirror plane are modelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DipoleOrientation {
    InPlane,
}

impl FromStr for DipoleOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "in-plane" => Ok(DipoleOrientation::InPlane),
            other => Err(Error::param(
                "atom.dipole_orientation",
                format!("`{other}` is not supported; the dipole must lie in the mirror plane (`in-plane`)"),
            )),
        }
    }
}

impl fmt::Display for DipoleOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("in-plane")
    }
}

/// Two-level atom: transition wavelength and dipole matrix element in units of
/// `e·a₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    /// Transition wavelength λ_a [m].
    pub wavelength: f64,
    /// Dipole matrix element 𝒟/(e a₀), dimensionless.
    pub dipole_factor: f64,
    pub orientation: DipoleOrientation,
}

impl AtomSpec {
    pub fn new(wavelength: f64, dipole_factor: f64, orientation: DipoleOrientation) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::param("atom.wavelength", format!("must be positive, got {wavelength}")));
        }
        if !(dipole_factor.is_finite() && dipole_factor > 0.0) {
            return Err(Error::param("atom.dipole_factor", format!("must be positive, got {dipole_factor}")));
        }
        Ok(Self { wavelength, dipole_factor, orientation })
    }

    /// Cesium D₂ line: λ_a = 852 nm, 𝒟 = 4.48 e a₀.
    pub fn cesium_d2() -> Self {
        Self { wavelength: 852.0e-9, dipole_factor: 4.48, orientation: DipoleOrientation::InPlane }
    }

    /// ω_a = 2πc/λ_a [rad/s].
    pub fn omega(&self, consts: &PhysicalConstants) -> f64 {
        2.0 * PI * consts.c / self.wavelength
    }

    /// 𝒟 [C m].
    pub fn dipole_moment(&self, consts: &PhysicalConstants) -> f64 {
        self.dipole_factor * consts.elementary_charge * consts.bohr_radius
    }
}

/// Planar resonator holding `n_wavelengths` atomic wavelengths, with a leaky
/// front mirror of parameter τ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    pub n_wavelengths: u32,
    pub tau: f64,
    /// ℓ = Nπc/ω_a [m].
    pub length: f64,
    /// ω_c = ω_a/N = πc/ℓ [rad/s].
    pub omega_c: f64,
}

impl CavitySpec {
    pub fn new(n_wavelengths: u32, tau: f64, omega_a: f64, consts: &PhysicalConstants) -> Result<Self> {
        if n_wavelengths == 0 {
            return Err(Error::param("cavity.n_wavelengths", "must be a positive integer"));
        }
        check_tau(tau)?;
        if n_wavelengths % 2 == 0 {
            log::warn!(
                "even N = {n_wavelengths}: the atom at z = -l/2 sits on a node of branch n = N, \
                 so no resonant peak forms at the atomic frequency"
            );
        }
        let omega_c = omega_a / f64::from(n_wavelengths);
        let length = PI * consts.c / omega_c;
        Ok(Self { n_wavelengths, tau, length, omega_c })
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 && tau <= TAU_MAX {
        Ok(())
    } else {
        Err(Error::LeakyRegime { tau, max: TAU_MAX })
    }
}

/// Everything the spectral computations need: constants, atom and cavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    pub consts: PhysicalConstants,
    pub atom: AtomSpec,
    pub cavity: CavitySpec,
}

impl PhysicalSetup {
    pub fn new(atom: AtomSpec, n_wavelengths: u32, tau: f64) -> Result<Self> {
        let consts = PhysicalConstants::CODATA_2018;
        let cavity = CavitySpec::new(n_wavelengths, tau, atom.omega(&consts), &consts)?;
        Ok(Self { consts, atom, cavity })
    }

    /// Cesium D₂ atom in a resonator of `n_wavelengths` wavelengths, τ = 10⁻³.
    pub fn cesium_d2(n_wavelengths: u32) -> Result<Self> {
        Self::new(AtomSpec::cesium_d2(), n_wavelengths, DEFAULT_TAU)
    }

    /// Same atom and τ, different cavity length.
    pub fn with_n_wavelengths(&self, n_wavelengths: u32) -> Result<Self> {
        Self::new(self.atom, n_wavelengths, self.cavity.tau)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.atom, self.cavity.n_wavelengths, tau)
    }

    pub fn c(&self) -> f64 {
        self.consts.c
    }

    pub fn tau(&self) -> f64 {
        self.cavity.tau
    }

    pub fn n_wavelengths(&self) -> u32 {
        self.cavity.n_wavelengths
    }

    pub fn omega_a(&self) -> f64 {
        self.atom.omega(&self.consts)
    }

    pub fn omega_c(&self) -> f64 {
        self.cavity.omega_c
    }

    pub fn length(&self) -> f64 {
        self.cavity.length
    }

    pub fn dipole_moment(&self) -> f64 {
        self.atom.dipole_moment(&self.consts)
    }

    /// ω → u = ω/ω_c.
    pub fn reduced(&self, omega: f64) -> f64 {
        omega / self.cavity.omega_c
    }

    /// u → ω = u ω_c.
    pub fn angular(&self, u: f64) -> f64 {
        u * self.cavity.omega_c
    }

    /// Pole half-width cτ²/(4ℓ) of the quasi-mode amplitudes [rad/s].
    pub fn pole_halfwidth(&self) -> f64 {
        self.consts.c * self.cavity.tau.powi(2) / (4.0 * self.cavity.length)
    }

    /// Pole half-width in units of ω_c, τ²/(4π).
    pub fn reduced_halfwidth(&self) -> f64 {
        self.cavity.tau.powi(2) / (4.0 * PI)
    }

    /// Reduced waist v = wω_c/c.
    pub fn reduced_waist(&self, waist: f64) -> f64 {
        waist * self.cavity.omega_c / self.consts.c
    }

    /// Form-factor scale K = 𝒟²ω_c³/(ε₀π²ħc³) [rad/s].
    pub fn prefactor_k(&self) -> f64 {
        prefactor_k(&self.consts, self.dipole_moment(), self.cavity.omega_c)
    }

    /// ω_{n,k} = c√((nπ/ℓ)² + k²).
    pub fn quasimode_frequency(&self, n: u32, k: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::param("n", "branch index must be at least 1"));
        }
        if !(k >= 0.0) {
            return Err(Error::param("k", format!("in-plane wavenumber must be non-negative, got {k}")));
        }
        Ok(self.quasimode_frequency_unchecked(n, k))
    }

    pub(crate) fn quasimode_frequency_unchecked(&self, n: u32, k: f64) -> f64 {
        let kz = f64::from(n) * PI / self.cavity.length;
        self.consts.c * kz.hypot(k)
    }

    /// Reads a setup from flat `key = value` pairs. Missing keys fall back to
    /// the Cs D₂ / τ = 10⁻³ defaults; keys outside `atom.*`/`cavity.*` are
    /// left for the caller.
    pub fn from_config(values: &BTreeMap<String, String>) -> Result<Self> {
        let defaults = AtomSpec::cesium_d2();
        let wavelength_nm = parse_or(values, "atom.wavelength_nm", defaults.wavelength * 1e9)?;
        let dipole_factor = parse_or(values, "atom.dipole_factor", defaults.dipole_factor)?;
        let orientation = match values.get("atom.dipole_orientation") {
            Some(s) => s.parse()?,
            None => DipoleOrientation::InPlane,
        };
        let n: u32 = parse_or(values, "cavity.n_wavelengths", 1u32)?;
        let tau = parse_or(values, "cavity.tau", DEFAULT_TAU)?;
        let atom = AtomSpec::new(wavelength_nm * 1e-9, dipole_factor, orientation)?;
        Self::new(atom, n, tau)
    }
}

/// Keys understood by [`PhysicalSetup::from_config`].
pub const SETUP_KEYS: [&str; 5] = [
    "atom.wavelength_nm",
    "atom.dipole_factor",
    "atom.dipole_orientation",
    "cavity.n_wavelengths",
    "cavity.tau",
];

fn parse_or<T: FromStr>(values: &BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    match values.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse `{key}` = `{raw}`"))),
    }
}

/// K = 𝒟²ω_c³/(ε₀π²ħc³) for a raw dipole moment [C m].
pub fn prefactor_k(consts: &PhysicalConstants, dipole_moment: f64, omega_c: f64) -> f64 {
    dipole_moment.powi(2) * omega_c.powi(3)
        / (consts.epsilon0 * PI * PI * consts.hbar * consts.c.powi(3))
}

/// Parses flat `key = value` text. Blank lines and `#` comments are skipped;
/// duplicate keys are an error.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(out)
}
