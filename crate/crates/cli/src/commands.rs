//! The formfactor, triplet, sweep and profile commands.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use planarcav::analysis::{
    default_gamma_freq, extract_triplet_at, highest_odd_branch, sweep_n, sweep_w, CqedTriplet, SweepAxis,
    SweepResult, TripletOptions, GAMMA_FLOOR,
};
use planarcav::formfactor::{peak_adaptive_grid, GridSpec};
use planarcav::{FormFactorCurve, LateralProfile, Method, PhysicalSetup, Polarization, Target};
use serde::Serialize;

use crate::config::{parse_odd_range, Format, RunConfig};
use crate::error::CliError;
use crate::svg::{plot_csv, PlotSpec};

const MHZ: f64 = 2.0 * PI * 1e6;

/// Frequency distribution of the input pulse, recorded as metadata only.
#[derive(Serialize)]
struct PulseMetadata {
    model: &'static str,
    center_rad_per_s: f64,
    bandwidth_rad_per_s: f64,
}

fn pulse(cfg: &RunConfig, center: f64) -> Result<PulseMetadata, CliError> {
    let bw: f64 = cfg.get_or("pulse.bandwidth_mhz", 1.0)?;
    if !(bw > 0.0) {
        return Err(CliError::Config("pulse.bandwidth_mhz must be positive".into()));
    }
    Ok(PulseMetadata { model: "narrow-band gaussian", center_rad_per_s: center, bandwidth_rad_per_s: bw * MHZ })
}

fn prepare_out(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", cfg.out_dir.display())))
}

fn write_with<F>(cfg: &RunConfig, name: &str, f: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let path = cfg.output_path(name);
    let mut w = BufWriter::new(File::create(&path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(path)
}

fn write_json<T: Serialize>(cfg: &RunConfig, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    write_with(cfg, name, |w| writeln!(w, "{text}"))
}

/// Writes the CSV (always when SVG is requested, since plots are drawn from it).
fn emit_curve_files(cfg: &RunConfig, stem: &str, curve: &FormFactorCurve, json: impl Serialize, plot: PlotSpec) -> Result<(), CliError> {
    let csv_name = format!("{stem}.csv");
    if cfg.wants(Format::Csv) || cfg.wants(Format::Svg) {
        write_with(cfg, &csv_name, |w| curve.write_csv(w))?;
    }
    if cfg.wants(Format::Json) {
        write_json(cfg, &format!("{stem}.json"), &json)?;
    }
    if cfg.wants(Format::Svg) {
        plot_csv(&cfg.output_path(&csv_name), &cfg.output_path(&format!("{stem}.svg")), &plot)?;
    }
    Ok(())
}

fn setup_notes(setup: &PhysicalSetup) -> Vec<String> {
    vec![
        format!("N = {}", setup.n_wavelengths()),
        format!("tau = {:e}", setup.tau()),
        format!("lambda_a = {:.1} nm", 2.0 * PI * setup.c() / setup.omega_a() * 1e9),
        format!("w_c = {:.6e} rad/s", setup.omega_c()),
    ]
}

fn parse_profile(cfg: &RunConfig, setup: &PhysicalSetup, kind_key: &str, prefix: &str) -> Result<LateralProfile, CliError> {
    let kind = cfg.raw(kind_key).unwrap_or("optimal");
    let n = setup.n_wavelengths();
    match kind {
        "optimal" => {
            let v: f64 = cfg.get_or(&format!("{prefix}.f_over_wc"), f64::from(n))?;
            Ok(LateralProfile::optimal(setup, setup.angular(v), n)?)
        }
        "hg" | "hermite-gauss" => {
            let w: f64 = cfg.get_or(&format!("{prefix}.waist_um"), 500.0)?;
            Ok(LateralProfile::hermite_gauss(w * 1e-6)?)
        }
        other => Err(CliError::Config(format!("unknown profile '{other}' (expected optimal or hg)"))),
    }
}

pub fn formfactor(cfg: &RunConfig) -> Result<(), CliError> {
    let setup = cfg.setup()?;
    let n = setup.n_wavelengths();
    let kind = cfg.raw("formfactor.kind").ok_or_else(|| CliError::Config("missing --kind".into()))?.to_string();
    let hg_waist = || -> Result<LateralProfile, CliError> {
        Ok(LateralProfile::hermite_gauss(cfg.get_or::<f64>("formfactor.waist_um", 500.0)? * 1e-6)?)
    };
    let optimal = || -> Result<LateralProfile, CliError> {
        let v: f64 = cfg.get_or("formfactor.f_over_wc", f64::from(n))?;
        Ok(LateralProfile::optimal(&setup, setup.angular(v), n)?)
    };
    let target = match kind.as_str() {
        "total" => Target::Total,
        "cavity-optimal" => Target::Cavity(optimal()?),
        "cavity-hg" => Target::Cavity(hg_waist()?),
        "noncavity" => match cfg.raw("formfactor.profile").unwrap_or("optimal") {
            "optimal" => Target::Noncavity(optimal()?),
            "hg" | "hermite-gauss" => Target::Noncavity(hg_waist()?),
            other => return Err(CliError::Config(format!("unknown profile '{other}' (expected optimal or hg)"))),
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown kind '{other}' (expected total, cavity-optimal, cavity-hg or noncavity)"
            )))
        }
    };
    let method = match cfg.raw("formfactor.method").unwrap_or("closed") {
        "closed" => Method::Closed,
        "quadrature" => Method::Quadrature,
        other => return Err(CliError::Config(format!("unknown method '{other}' (expected closed or quadrature)"))),
    };
    let lo: f64 = cfg.get_or("formfactor.u_from", 0.5)?;
    let hi: f64 = cfg.get_or("formfactor.u_to", f64::from(n) + 1.0)?;
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::Config(format!("empty or non-positive frequency range [{lo}, {hi}] (in units of w_c)")));
    }
    let mut centers: Vec<f64> = (1..=n).step_by(2).map(f64::from).collect();
    if let Some(LateralProfile::Optimal { f, .. }) = target.profile() {
        centers.push(setup.reduced(*f));
    }
    let grid = peak_adaptive_grid(&GridSpec::new(lo, hi, centers), setup.reduced_halfwidth())?;
    let curve = FormFactorCurve::build(&setup, &target, n, &grid, method)?;
    prepare_out(cfg)?;
    #[derive(Serialize)]
    struct Doc<'a> {
        curve: &'a FormFactorCurve,
        pulse: PulseMetadata,
    }
    let stem = format!("formfactor_{kind}");
    let mut notes = setup_notes(&setup);
    if let Some(label) = &curve.params.profile_label {
        notes.push(label.clone());
    }
    notes.push(format!("method = {:?}", curve.method).to_lowercase());
    let plot = PlotSpec {
        x_column: "u",
        series: vec![("value_rad_per_s", "form-factor")],
        x_label: "u = w / w_c",
        y_label: "form-factor [rad/s]",
        title: format!("{kind} form-factor"),
        notes,
        log_x: false,
    };
    emit_curve_files(cfg, &stem, &curve, Doc { curve: &curve, pulse: pulse(cfg, setup.omega_a())? }, plot)?;
    if curve.fell_back {
        eprintln!("warning: closed form failed its quadrature audit; curve recomputed by quadrature");
    }
    say!("wrote {} points to {}", curve.u.len(), cfg.out_dir.display());
    Ok(())
}

fn fmt_gamma(t: &CqedTriplet) -> String {
    if t.gamma_below_floor {
        "≤floor".to_string()
    } else {
        format!("{:.4e}", t.gamma / MHZ)
    }
}

pub fn summary_line(t: &CqedTriplet) -> String {
    format!("(g, kappa, gamma) = 2π·({:.3}, {:.3}, {}) MHz", t.g / MHZ, t.kappa / MHZ, fmt_gamma(t))
}

pub fn triplet(cfg: &RunConfig) -> Result<(), CliError> {
    let setup = cfg.setup()?;
    let n = setup.n_wavelengths();
    let profile = parse_profile(cfg, &setup, "triplet.profile", "triplet")?;
    let center = match profile {
        LateralProfile::Optimal { f, .. } => {
            if cfg.raw("triplet.peak").is_some() {
                return Err(CliError::Config("triplet.peak applies to the hg profile only".into()));
            }
            setup.reduced(f)
        }
        LateralProfile::HermiteGauss { .. } => {
            let peak: u32 = cfg.get_or("triplet.peak", highest_odd_branch(n)?)?;
            if peak % 2 == 0 || peak > n {
                return Err(CliError::Config(format!("peak must be an odd branch not above N = {n}, got {peak}")));
            }
            f64::from(peak)
        }
    };
    let gamma_freq = match cfg.get::<f64>("triplet.gamma_u")? {
        Some(u) if u > 0.0 => setup.angular(u),
        Some(u) => return Err(CliError::Config(format!("triplet.gamma_u must be positive, got {u}"))),
        None => default_gamma_freq(&setup, &profile),
    };
    let run = extract_triplet_at(&setup, &profile, n, center, gamma_freq, &TripletOptions::default())?;
    prepare_out(cfg)?;
    let t = &run.triplet;
    #[derive(Serialize)]
    struct Doc<'a> {
        triplet: &'a CqedTriplet,
        profile: String,
        n_wavelengths: u32,
        tau: f64,
        gamma_floor_rad_per_s: f64,
        pulse: PulseMetadata,
    }
    let doc = Doc {
        triplet: t,
        profile: profile.describe(&setup),
        n_wavelengths: n,
        tau: setup.tau(),
        gamma_floor_rad_per_s: GAMMA_FLOOR,
        pulse: pulse(cfg, setup.omega_a())?,
    };
    let mut notes = setup_notes(&setup);
    notes.push(profile.describe(&setup));
    notes.push(format!("g = {:.3} MHz x 2pi", t.g / MHZ));
    notes.push(format!("kappa = {:.3} MHz x 2pi", t.kappa / MHZ));
    let plot = PlotSpec {
        x_column: "u",
        series: vec![("value_rad_per_s", "cavity form-factor")],
        x_label: "u = w / w_c",
        y_label: "F_C [rad/s]",
        title: format!("cavity form-factor peak at u = {center}"),
        notes,
        log_x: false,
    };
    emit_curve_files(cfg, "triplet_curve", &run.curve, &run.curve, plot)?;
    if cfg.wants(Format::Json) {
        write_json(cfg, "triplet.json", &doc)?;
    }
    say!("{}", summary_line(t));
    say!("{}", serde_json::to_string(&doc).map_err(|e| CliError::Numerical(e.to_string()))?);
    if !t.fit.is_converged() {
        eprintln!("warning: least-squares fit degraded; values are direct measurements");
    }
    Ok(())
}

/// Fraction of sweep points that must succeed for exit code 0.
const SWEEP_SUCCESS: f64 = 0.9;

pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let setup = cfg.setup()?;
    let opts = TripletOptions::default();
    let axis = cfg.raw("sweep.axis").ok_or_else(|| CliError::Config("missing --axis".into()))?;
    let result = match axis {
        "n" | "N" => {
            let list = parse_odd_range(cfg.raw("sweep.odd").unwrap_or("1..29"))?;
            sweep_n(&setup, &list, &opts)?
        }
        "waist" | "w" => {
            let from: f64 = cfg.get_or("sweep.from_um", 50.0)?;
            let to: f64 = cfg.get_or("sweep.to_um", 800.0)?;
            let points: usize = cfg.get_or("sweep.points", 8)?;
            let list = log_range(from, to, points)?;
            sweep_w(&setup, &list.iter().map(|w| w * 1e-6).collect::<Vec<_>>(), &opts)?
        }
        other => return Err(CliError::Config(format!("unknown sweep axis '{other}' (expected n or waist)"))),
    };
    prepare_out(cfg)?;
    let stem = match result.axis {
        SweepAxis::N => "sweep_n",
        SweepAxis::Waist => "sweep_waist",
    };
    let csv_name = format!("{stem}.csv");
    if cfg.wants(Format::Csv) || cfg.wants(Format::Svg) {
        write_with(cfg, &csv_name, |w| result.write_csv(w))?;
    }
    if cfg.wants(Format::Json) {
        write_with(cfg, &format!("{stem}.json"), |w| writeln!(w, "{}", result.to_json()))?;
    }
    if cfg.wants(Format::Svg) {
        let mut notes = setup_notes(&setup);
        if result.axis == SweepAxis::N {
            notes.remove(0);
            notes.push("optimal profile, f = w_a".into());
        } else {
            notes.push("hermite-gauss, gamma at 0.99 w_a".into());
        }
        if let Some(c) = result.crossing {
            notes.push(format!("kappa < g from {c}"));
        }
        let plot = PlotSpec {
            x_column: "sweep_value",
            series: vec![("g_rad_s", "g"), ("kappa_rad_s", "kappa"), ("gamma_rad_s", "gamma")],
            x_label: if result.axis == SweepAxis::N { "N" } else { "waist [m]" },
            y_label: "rate [rad/s]",
            title: format!("{stem}: g, kappa, gamma"),
            notes,
            log_x: result.axis == SweepAxis::Waist,
        };
        plot_csv(&cfg.output_path(&csv_name), &cfg.output_path(&format!("{stem}.svg")), &plot)?;
    }
    print_sweep(&result);
    if result.success_fraction() < SWEEP_SUCCESS {
        return Err(CliError::Numerical(format!(
            "only {} of {} sweep points succeeded",
            result.succeeded(),
            result.rows.len()
        )));
    }
    Ok(())
}

fn print_sweep(r: &SweepResult) {
    let unit = match r.axis {
        SweepAxis::N => 1.0,
        SweepAxis::Waist => 1e6,
    };
    say!("{:>10} {:>12} {:>12} {:>12} {:>9}   (rates in MHz x 2pi)", if unit == 1.0 { "N" } else { "w [um]" }, "g", "kappa", "gamma", "residual");
    for row in &r.rows {
        match &row.triplet {
            Some(t) => say!(
                "{:>10.1} {:>12.4} {:>12.4} {:>12} {:>9.4}",
                row.value * unit,
                t.g / MHZ,
                t.kappa / MHZ,
                fmt_gamma(t),
                t.fit.residual
            ),
            None => say!("{:>10.1} failed: {}", row.value * unit, row.error.as_deref().unwrap_or("unknown")),
        }
    }
    if let Some(c) = r.crossing {
        say!("kappa < g first at {c}");
    }
}

/// `points` log-spaced values from `from` to `to` inclusive.
pub fn log_range(from: f64, to: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(from > 0.0) || !(to >= from) || points == 0 || (points > 1 && to == from) || (points == 1 && to != from) {
        return Err(CliError::Config(format!("empty waist range {from}..{to} with {points} points")));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let r = (to / from).ln();
    Ok((0..points).map(|i| if i + 1 == points { to } else { from * (r * i as f64 / (points - 1) as f64).exp() }).collect())
}

pub fn profile(cfg: &RunConfig) -> Result<(), CliError> {
    let setup = cfg.setup()?;
    let profile = parse_profile(cfg, &setup, "profile.kind", "profile")?;
    let kmax: f64 = cfg.get_or("profile.k_max", profile.kappa_cutoff(&setup))?;
    let nk: usize = cfg.get_or("profile.k_points", 200)?;
    let nt: usize = cfg.get_or("profile.theta_points", 72)?;
    if !(kmax > 0.0) || nk < 2 || nt < 1 {
        return Err(CliError::Config("profile grid needs k_max > 0, k_points >= 2, theta_points >= 1".into()));
    }
    let kc = setup.omega_c() / setup.c();
    let kappas: Vec<f64> = (0..nk).map(|i| kmax * i as f64 / (nk - 1) as f64).collect();
    prepare_out(cfg)?;
    if cfg.wants(Format::Csv) {
        write_with(cfg, "profile.csv", |w| {
            writeln!(w, "kappa,k_rad_per_m,theta_rad,abs_phi_par,abs_phi_perp")?;
            for &kap in &kappas {
                for j in 0..nt {
                    let th = 2.0 * PI * j as f64 / nt as f64;
                    let k = kap * kc;
                    let par = profile.evaluate(&setup, Polarization::Par, k, th).norm();
                    let perp = profile.evaluate(&setup, Polarization::Perp, k, th).norm();
                    writeln!(w, "{kap:.11e},{k:.11e},{th:.11e},{par:.11e},{perp:.11e}")?;
                }
            }
            Ok(())
        })?;
    }
    if cfg.wants(Format::Svg) || cfg.wants(Format::Csv) {
        write_with(cfg, "profile_radial.csv", |w| {
            writeln!(w, "kappa,k_rad_per_m,abs_radial_par,abs_radial_perp")?;
            for &kap in &kappas {
                let k = kap * kc;
                let par = profile.radial(&setup, Polarization::Par, k).norm();
                let perp = profile.radial(&setup, Polarization::Perp, k).norm();
                writeln!(w, "{kap:.11e},{k:.11e},{par:.11e},{perp:.11e}")?;
            }
            Ok(())
        })?;
    }
    if cfg.wants(Format::Json) {
        #[derive(Serialize)]
        struct Doc {
            profile: LateralProfile,
            label: String,
            k_max_reduced: f64,
            k_points: usize,
            theta_points: usize,
            pulse: PulseMetadata,
        }
        write_json(
            cfg,
            "profile.json",
            &Doc {
                profile,
                label: profile.describe(&setup),
                k_max_reduced: kmax,
                k_points: nk,
                theta_points: nt,
                pulse: pulse(cfg, setup.omega_a())?,
            },
        )?;
    }
    if cfg.wants(Format::Svg) {
        let mut notes = setup_notes(&setup);
        notes.push(profile.describe(&setup));
        let plot = PlotSpec {
            x_column: "kappa",
            series: vec![("abs_radial_par", "|phi_par| (theta = 0)"), ("abs_radial_perp", "|phi_perp| (theta = pi/2)")],
            x_label: "k c / w_c",
            y_label: "|phi| [m]",
            title: "lateral profile, radial part".into(),
            notes,
            log_x: false,
        };
        plot_csv(&cfg.output_path("profile_radial.csv"), &cfg.output_path("profile.svg"), &plot)?;
    }
    say!("profile {} written to {}", profile.describe(&setup), cfg.out_dir.display());
    Ok(())
}
