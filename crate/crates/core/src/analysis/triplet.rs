//! (g, κ, γ) extraction from a single cavity form-factor peak.

use serde::{Deserialize, Serialize};

use super::lorentz::{fit_lorentzian, LorentzianFit};
use crate::error::{Error, Result};
use crate::formfactor::{
    cavity_ff_closed, noncavity_ff, peak_adaptive_grid, FormFactorCurve, GridSpec, Method, Target,
};
use crate::profiles::LateralProfile;
use crate::quad::{clustered_breaks, integrate, QuadOptions};
use crate::setup::PhysicalSetup;

/// γ below this value [rad/s] is reported as "at floor".
pub const GAMMA_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletOptions {
    /// Window half-width in u around the peak branch.
    pub window_halfwidth: f64,
    pub cluster_points: usize,
    /// In units of δ.
    pub cluster_span: f64,
    pub tail_points: usize,
    /// Also compute g from the area integral by adaptive quadrature.
    pub area_integral: bool,
}

impl Default for TripletOptions {
    fn default() -> Self {
        let g = GridSpec::new(0.0, 1.0, Vec::new());
        Self {
            window_halfwidth: 1.0,
            cluster_points: g.cluster_points,
            cluster_span: g.cluster_span,
            tail_points: g.tail_points,
            area_integral: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqedTriplet {
    /// sqrt of the fitted Lorentzian area [rad/s].
    pub g: f64,
    pub kappa: f64,
    /// max(γ_raw, 0) [rad/s].
    pub gamma: f64,
    pub gamma_raw: f64,
    pub gamma_eval_freq: f64,
    pub gamma_below_floor: bool,
    /// sqrt(∫F_C dω) over the window, when requested.
    pub g_integral: Option<f64>,
    /// Peak branch or optimal centre, in u.
    pub peak_center: f64,
    pub fit: LorentzianFit,
}

/// Triplet together with the curve it was read from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletRun {
    pub triplet: CqedTriplet,
    pub curve: FormFactorCurve,
}

/// Highest odd branch not above `n_max`.
pub fn highest_odd_branch(n_max: u32) -> Result<u32> {
    match n_max {
        0 => Err(Error::param("N", "must be at least 1")),
        n if n % 2 == 1 => Ok(n),
        n => Ok(n - 1),
    }
}

/// Default peak centre in u: f/ω_c for the optimal profile, highest odd
/// branch for Hermite-Gauss.
pub fn default_peak_center(setup: &PhysicalSetup, profile: &LateralProfile, n_max: u32) -> Result<f64> {
    match *profile {
        LateralProfile::Optimal { f, .. } => Ok(setup.reduced(f)),
        LateralProfile::HermiteGauss { .. } => Ok(f64::from(highest_odd_branch(n_max)?)),
    }
}

/// Default γ evaluation frequency: f for optimal, 0.99·ω_a for Hermite-Gauss.
pub fn default_gamma_freq(setup: &PhysicalSetup, profile: &LateralProfile) -> f64 {
    match *profile {
        LateralProfile::Optimal { f, .. } => f,
        LateralProfile::HermiteGauss { .. } => 0.99 * setup.omega_a(),
    }
}

/// Window [c − h, c + h] in u, clipped below at c/2.
pub fn peak_window(center: f64, halfwidth: f64) -> (f64, f64) {
    ((center - halfwidth).max(0.5 * center), center + halfwidth)
}

/// Triplet at the default peak with the default γ frequency.
pub fn extract_triplet(setup: &PhysicalSetup, profile: &LateralProfile, n_max: u32) -> Result<CqedTriplet> {
    let center = default_peak_center(setup, profile, n_max)?;
    let gf = default_gamma_freq(setup, profile);
    Ok(extract_triplet_at(setup, profile, n_max, center, gf, &TripletOptions::default())?.triplet)
}

/// Triplet of the peak at reduced frequency `center`, with γ at `gamma_eval_freq` [rad/s].
pub fn extract_triplet_at(
    setup: &PhysicalSetup,
    profile: &LateralProfile,
    n_max: u32,
    center: f64,
    gamma_eval_freq: f64,
    opts: &TripletOptions,
) -> Result<TripletRun> {
    if !(center > 0.0) || !center.is_finite() {
        return Err(Error::param("peak centre", "must be positive"));
    }
    if !(opts.window_halfwidth > 0.0) {
        return Err(Error::param("window_halfwidth", "must be positive"));
    }
    if !(gamma_eval_freq > 0.0) || !gamma_eval_freq.is_finite() {
        return Err(Error::param("gamma_eval_freq", "must be positive"));
    }
    let (lo, hi) = peak_window(center, opts.window_halfwidth);
    let spec = GridSpec {
        lo,
        hi,
        centers: vec![center],
        cluster_points: opts.cluster_points,
        cluster_span: opts.cluster_span,
        tail_points: opts.tail_points,
    };
    let grid = peak_adaptive_grid(&spec, setup.reduced_halfwidth())?;
    let curve = FormFactorCurve::build(setup, &Target::Cavity(*profile), n_max, &grid, Method::Closed)?;
    let window = (setup.angular(lo), setup.angular(hi));
    let fit = fit_lorentzian(&curve, window)?;
    let g_integral = if opts.area_integral { Some(area_integral(setup, profile, n_max, center, lo, hi)?.sqrt()) } else { None };
    let nc = noncavity_ff(setup, gamma_eval_freq, profile, n_max)?;
    let triplet = CqedTriplet {
        g: fit.g(),
        kappa: fit.fwhm,
        gamma: nc.value,
        gamma_raw: nc.raw,
        gamma_eval_freq,
        gamma_below_floor: nc.value < GAMMA_FLOOR,
        g_integral,
        peak_center: center,
        fit,
    };
    Ok(TripletRun { triplet, curve })
}

/// ∫F_C dω over [lo, hi] (reduced units) by adaptive quadrature.
fn area_integral(setup: &PhysicalSetup, profile: &LateralProfile, n_max: u32, center: f64, lo: f64, hi: f64) -> Result<f64> {
    let delta = setup.reduced_halfwidth();
    let mut breaks = vec![lo, hi];
    breaks.extend(clustered_breaks(center, delta, 8, lo, hi));
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-8, max_intervals: 4000 };
    let err = std::cell::Cell::new(None);
    let est = integrate(
        |u| match cavity_ff_closed(setup, setup.angular(u), profile, n_max) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        },
        &breaks,
        opts,
    )?;
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(est.value * setup.omega_c())
}
