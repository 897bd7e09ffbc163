//! Quick invariant suite with a pass/fail table.

use planarcav::formfactor::{
    cavity_ff_hg, cavity_ff_optimal_closed, cavity_ff_quadrature, peak_adaptive_grid, total_ff_closed,
    total_ff_quadrature, GridSpec,
};
use planarcav::modes::{identity_residual, normalization_integral};
use planarcav::profiles::profile_norm;
use planarcav::slab::{slab_response, Polarization};
use planarcav::{Error, FormFactorCurve, LateralProfile, Method, Target};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;

/// Closed-form/quadrature agreement required by the oracle checks.
const ORACLE_TOL: f64 = 1e-3;
/// Factor applied to closed-form values by the tamper hook.
const TAMPER_FACTOR: f64 = 1.01;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, result: Result<(bool, String), Error>) -> Check {
    match result {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check { name, pass: false, detail: format!("error: {e}") },
    }
}

pub fn run(cfg: &RunConfig, tamper: bool) -> Result<(), CliError> {
    let setup = cfg.setup()?;
    let seed: u64 = cfg.get_or("selftest.seed", 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = setup.n_wavelengths();
    let kc = setup.omega_c() / setup.c();
    let closed_scale = if tamper { TAMPER_FACTOR } else { 1.0 };
    let mut checks = Vec::new();

    checks.push(check("slab unitarity", (|| {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let kz = rng.gen_range(1e3..1e8);
            let r = slab_response(10f64.powf(rng.gen_range(-6.0..6.0)), kz, kz * rng.gen_range(1.0..20.0))?;
            for a in Polarization::BOTH {
                worst = worst.max((r.t(a).norm_sqr() + r.r(a).norm_sqr() - 1.0).abs());
            }
        }
        Ok((worst <= 1e-12, format!("worst |t|²+|r|²−1 = {worst:.1e}")))
    })()));

    checks.push(check("normalization integral", (|| {
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let k = rng.gen_range(0.0..3.0) * kc;
            worst = worst.max((normalization_integral(&setup, rng.gen_range(1..8), k)?.value - 1.0).abs());
        }
        Ok((worst <= 1e-6, format!("worst deviation {worst:.1e}")))
    })()));

    checks.push(check("amplitude identity", (|| {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let m = 2 * rng.gen_range(0..4u32) + 1;
            let k = rng.gen_range(0.0..3.0) * kc;
            let w = setup.quasimode_frequency(m, k)? + rng.gen_range(-1e4..1e4) * setup.pole_halfwidth();
            worst = worst.max(identity_residual(&setup, m, w, k));
        }
        Ok((worst <= 1e-12, format!("worst residual {worst:.1e}")))
    })()));

    let optimal = LateralProfile::optimal(&setup, setup.omega_a(), n);
    checks.push(check("profile normalization", (|| {
        let mut worst = 0.0f64;
        for w in [100e-6, 500e-6] {
            worst = worst.max((profile_norm(&setup, &LateralProfile::hermite_gauss(w)?)?.value - 1.0).abs());
        }
        worst = worst.max((profile_norm(&setup, &optimal.clone()?)?.value - 1.0).abs());
        Ok((worst <= 1e-6, format!("worst deviation {worst:.1e}")))
    })()));

    checks.push(check("oracle: total form-factor", (|| {
        let mut worst = 0.0f64;
        for _ in 0..6 {
            let w = setup.angular(rng.gen_range(1.05..f64::from(n) + 1.0));
            let c = closed_scale * total_ff_closed(&setup, w, n)?;
            worst = worst.max((c / total_ff_quadrature(&setup, w, n)? - 1.0).abs());
        }
        Ok((worst <= ORACLE_TOL, format!("worst relative difference {worst:.1e}")))
    })()));

    checks.push(check("oracle: optimal cavity form-factor", (|| {
        let p = optimal.clone()?;
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let w = setup.angular(f64::from(n) + rng.gen_range(-300.0..300.0) * setup.reduced_halfwidth());
            let c = closed_scale * cavity_ff_optimal_closed(&setup, w, setup.omega_a(), n)?;
            worst = worst.max((c / cavity_ff_quadrature(&setup, w, &p, n)? - 1.0).abs());
        }
        Ok((worst <= ORACLE_TOL, format!("worst relative difference {worst:.1e}")))
    })()));

    checks.push(check("oracle: Hermite-Gauss cavity form-factor", (|| {
        let p = LateralProfile::hermite_gauss(500e-6)?;
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let w = setup.angular(1.0 + rng.gen_range(-50.0..500.0) * setup.reduced_halfwidth());
            let c = closed_scale * cavity_ff_hg(&setup, w, 500e-6, n)?;
            worst = worst.max((c / cavity_ff_quadrature(&setup, w, &p, n)? - 1.0).abs());
        }
        Ok((worst <= ORACLE_TOL, format!("worst relative difference {worst:.1e}")))
    })()));

    checks.push(check("domination F_C <= F_T", (|| {
        let spec = GridSpec { cluster_points: 401, tail_points: 100, ..GridSpec::new(0.5, f64::from(n) + 1.0, vec![f64::from(n)]) };
        let grid = peak_adaptive_grid(&spec, setup.reduced_halfwidth())?;
        let mut points = 0;
        let mut ok = true;
        for p in [optimal.clone()?, LateralProfile::hermite_gauss(200e-6)?] {
            let c = FormFactorCurve::build(&setup, &Target::Cavity(p), n, &grid, Method::Closed)?;
            for (w, fc) in c.omega.iter().zip(&c.values) {
                ok &= *fc <= total_ff_closed(&setup, *w, n)? * (1.0 + 1e-6);
                points += 1;
            }
        }
        Ok((ok, format!("{points} grid points")))
    })()));

    checks.push(check("Cauchy-Schwarz saturation", (|| {
        let f = setup.omega_a();
        let r = cavity_ff_optimal_closed(&setup, f, f, n)? / total_ff_closed(&setup, f, n)?;
        Ok(((r - 1.0).abs() <= 1e-3, format!("F_C(f)/F_T(f) = {r:.9}")))
    })()));

    checks.push(check("leaky-regime rejection (tau = 0.5)", (|| {
        Ok(match setup.with_tau(0.5) {
            Err(Error::LeakyRegime { .. }) => (true, "rejected".to_string()),
            Err(e) => (false, format!("wrong error: {e}")),
            Ok(_) => (false, "accepted".to_string()),
        })
    })()));

    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    say!("{:width$}  result  detail", "check");
    for c in &checks {
        say!("{:width$}  {:6}  {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    say!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(CliError::SelftestFailed(failed));
    }
    Ok(())
}
