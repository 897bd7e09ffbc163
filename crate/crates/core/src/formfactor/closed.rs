//! Reduced closed forms of the total, optimal-cavity and Hermite-Gauss
//! form-factors.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::profiles::HG_EXPONENT_CUTOFF;
use crate::quad::{clustered_breaks, integrate_complex, QuadOptions};
use crate::setup::PhysicalSetup;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn odd_branches(n_max: u32) -> impl Iterator<Item = u32> {
    (1..=n_max).step_by(2)
}

/// F°_T(u, N) = Σ_{n odd ≤ N} (n² + u²)(1/2 + arctan[(4π/τ²)(u − n)]/π).
pub fn total_ff_reduced(u: f64, n_max: u32, tau: f64) -> f64 {
    let scale = 4.0 * PI / (tau * tau);
    odd_branches(n_max)
        .map(|n| {
            let n = f64::from(n);
            (n * n + u * u) * step(scale * (u - n))
        })
        .sum()
}

/// 1/2 + arctan(x)/π without cancellation for large negative x.
fn step(x: f64) -> f64 {
    if x < 0.0 {
        (-1.0 / x).atan() / PI
    } else {
        0.5 + x.atan() / PI
    }
}

/// F°_C(u, v, N) of the optimal profile, principal-branch arctanh.
pub fn optimal_fc_reduced(u: f64, v: f64, n_max: u32, tau: f64) -> Complex64 {
    optimal_fc_impl(u, v, n_max, tau, OptimalVariant::Consistent)
}

/// Variant of [`optimal_fc_reduced`] whose second arctanh coefficient is
/// π(u+v) instead of π(u+v)². Kept to show that it breaks F_C(f) = F_T(f).
pub fn optimal_fc_reduced_linear_coefficient(u: f64, v: f64, n_max: u32, tau: f64) -> Complex64 {
    optimal_fc_impl(u, v, n_max, tau, OptimalVariant::LinearCoefficient)
}

#[derive(Clone, Copy)]
enum OptimalVariant {
    Consistent,
    LinearCoefficient,
}

fn optimal_fc_impl(u: f64, v: f64, n_max: u32, tau: f64, variant: OptimalVariant) -> Complex64 {
    let d = Complex64::new(2.0 * PI * (v - u), tau * tau);
    let mid = 0.5 * (u + v);
    let coeff = match variant {
        OptimalVariant::Consistent => PI * (u + v) * (u + v),
        OptimalVariant::LinearCoefficient => PI * (u + v),
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for n in odd_branches(n_max) {
        let n = f64::from(n);
        let at = (4.0 * PI * (n - mid) / d).atanh();
        sum += n * n * (I * 2.0 * PI * PI + 4.0 * PI * at) / d;
        sum += (I * 2.0 * PI * PI * v * v + coeff * at) / d;
    }
    sum
}

/// F°_T(u) recovered as (τ/2π)²·Re F°_C(u, u); equal to [`total_ff_reduced`].
pub fn total_ff_reduced_from_fc(u: f64, n_max: u32, tau: f64) -> f64 {
    (tau / (2.0 * PI)).powi(2) * optimal_fc_reduced(u, u, n_max, tau).re
}

/// F°_T(u)F°_T(v) − (τ/2π)⁴|F°_C(u,v)|², the numerator of γ for the optimal
/// profile, arranged to vanish identically at u = v.
pub fn optimal_gram_reduced(u: f64, v: f64, n_max: u32, tau: f64) -> f64 {
    let t2 = (tau / (2.0 * PI)).powi(2);
    let fu = optimal_fc_reduced(u, u, n_max, tau).re;
    let fv = optimal_fc_reduced(v, v, n_max, tau).re;
    let fc = optimal_fc_reduced(u, v, n_max, tau);
    t2 * t2 * (fu * fv - fc.norm_sqr())
}

/// K·F°_T(ω/ω_c, N).
pub fn total_ff_closed(setup: &PhysicalSetup, omega: f64, n_max: u32) -> Result<f64> {
    check_args(omega, n_max)?;
    Ok(setup.prefactor_k() * total_ff_reduced(setup.reduced(omega), n_max, setup.tau()))
}

/// K(τ/2π)⁴|F°_C(u,v,N)|²/F°_T(v,N).
pub fn cavity_ff_optimal_closed(setup: &PhysicalSetup, omega: f64, f: f64, n_max: u32) -> Result<f64> {
    check_args(omega, n_max)?;
    let v = setup.reduced(f);
    if !(v >= 1.0) {
        return Err(Error::param("f", format!("must be at least w_c, got {v} w_c")));
    }
    let tau = setup.tau();
    let fc = optimal_fc_reduced(setup.reduced(omega), v, n_max, tau);
    let ft = total_ff_reduced(v, n_max, tau);
    if !(ft > 0.0) {
        return Err(Error::UndefinedProfile { v });
    }
    Ok(setup.prefactor_k() * (tau / (2.0 * PI)).powi(4) * fc.norm_sqr() / ft)
}

/// F_T − F_C for the optimal profile, free of cancellation at ω = f.
pub fn noncavity_optimal_closed(setup: &PhysicalSetup, omega: f64, f: f64, n_max: u32) -> Result<f64> {
    check_args(omega, n_max)?;
    let tau = setup.tau();
    let v = setup.reduced(f);
    let ft = total_ff_reduced_from_fc(v, n_max, tau);
    if !(ft > 0.0) {
        return Err(Error::UndefinedProfile { v });
    }
    Ok(setup.prefactor_k() * optimal_gram_reduced(setup.reduced(omega), v, n_max, tau) / ft)
}

/// F•_C(u, v, N) with the pole at s = u removed analytically.
pub fn hg_fc_reduced(u: f64, v: f64, n_max: u32, tau: f64) -> Result<Complex64> {
    let delta = tau * tau / (4.0 * PI);
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 4000 };
    let mut total = Complex64::new(0.0, 0.0);
    for n in odd_branches(n_max) {
        let nf = f64::from(n);
        let top = (nf * nf + HG_EXPONENT_CUTOFF / (v * v)).sqrt();
        let g = |s: f64| {
            let q = ((s - nf) * (s + nf)).max(0.0);
            (s * q).sqrt() * (nf + s) * (-0.5 * v * v * q).exp()
        };
        let mut breaks = vec![nf, top];
        breaks.extend(clustered_breaks(nf, delta, 12, nf, top).into_iter().filter(|&x| x > nf));
        breaks.extend(clustered_breaks(u, delta, 12, nf, top));
        let sign = (1.5 * PI * nf).sin();
        let part = if u > nf && u < top {
            let gu = g(u);
            let est = integrate_complex(|s| (g(s) - gu) / Complex64::new(u - s, -delta), &breaks, opts)?;
            let log = Complex64::new(u - nf, -delta).ln() - Complex64::new(u - top, -delta).ln();
            est.value + gu * log
        } else {
            integrate_complex(|s| g(s) / Complex64::new(u - s, -delta), &breaks, opts)?.value
        };
        total += sign * part;
    }
    Ok(total)
}

/// K·(τ²v⁴/(4π²))·|F•_C(u, v, N)|² with v = wω_c/c.
pub fn cavity_ff_hg(setup: &PhysicalSetup, omega: f64, waist: f64, n_max: u32) -> Result<f64> {
    check_args(omega, n_max)?;
    if !(waist > 0.0) {
        return Err(Error::param("waist", format!("must be positive, got {waist}")));
    }
    let v = setup.reduced_waist(waist);
    let tau = setup.tau();
    let fb = hg_fc_reduced(setup.reduced(omega), v, n_max, tau)?;
    Ok(setup.prefactor_k() * tau * tau * v.powi(4) / (4.0 * PI * PI) * fb.norm_sqr())
}

pub(crate) fn check_args(omega: f64, n_max: u32) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::param("omega", format!("must be positive, got {omega}")));
    }
    if n_max == 0 {
        return Err(Error::param("N", "must be a positive integer"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TAU: f64 = 1e-3;

    fn saturation(v: f64, n: u32, fc: Complex64) -> f64 {
        let ft = total_ff_reduced(v, n, TAU);
        (TAU / (2.0 * PI)).powi(4) * fc.norm_sqr() / (ft * ft)
    }

    #[test]
    fn worked_examples() {
        assert_relative_eq!(total_ff_reduced(1.0, 1, TAU), 1.0, max_relative = 1e-15);
        let low = total_ff_reduced(0.5, 1, TAU);
        assert!(low > 0.0 && low < 1e-6, "{low}");
    }

    #[test]
    fn even_n_adds_nothing() {
        for u in [0.7, 1.3, 2.9, 4.2] {
            assert_eq!(total_ff_reduced(u, 4, TAU), total_ff_reduced(u, 3, TAU));
            assert_eq!(optimal_fc_reduced(u, 3.0, 4, TAU), optimal_fc_reduced(u, 3.0, 3, TAU));
        }
    }

    #[test]
    fn total_from_optimal_diagonal() {
        for n in [1, 3, 5, 9] {
            for u in [0.5, 1.0, 1.0 + 1e-7, 2.3, 3.0, 4.999, 7.5] {
                let scale: f64 = odd_branches(n).map(|m| f64::from(m * m) + u * u).sum();
                let diff = total_ff_reduced_from_fc(u, n, TAU) - total_ff_reduced(u, n, TAU);
                assert!(diff.abs() <= 1e-12 * scale, "{n} {u} {diff}");
            }
        }
    }

    #[test]
    fn optimal_saturates_at_centre() {
        for n in [1u32, 3, 5, 7] {
            let v = f64::from(n);
            assert_relative_eq!(saturation(v, n, optimal_fc_reduced(v, v, n, TAU)), 1.0, max_relative = 1e-9);
            for off in [0.3, 2.5] {
                let v = f64::from(n) + off;
                assert_relative_eq!(saturation(v, n, optimal_fc_reduced(v, v, n, TAU)), 1.0, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn linear_coefficient_breaks_saturation() {
        let s = saturation(3.0, 3, optimal_fc_reduced_linear_coefficient(3.0, 3.0, 3, TAU));
        assert!((s - 1.0).abs() > 0.1, "{s}");
    }

    #[test]
    fn gram_vanishes_at_centre() {
        for n in [1u32, 3, 5] {
            let v = f64::from(n);
            let g = optimal_gram_reduced(v, v, n, TAU);
            assert!(g <= 0.0 && g.abs() < 1e-25, "{g}");
        }
    }

    #[test]
    fn gram_nonnegative() {
        let delta = TAU * TAU / (4.0 * PI);
        for n in [1u32, 3] {
            let v = f64::from(n);
            let ftv = total_ff_reduced(v, n, TAU);
            for k in -300..=300 {
                let u = v + f64::from(k) * 10.0 * delta;
                let g = optimal_gram_reduced(u, v, n, TAU);
                assert!(g >= -1e-12 * total_ff_reduced(u, n, TAU) * ftv, "{u} {g}");
            }
        }
    }

    #[test]
    fn hg_peak_scales_with_branch() {
        let v = 3000.0;
        let a = hg_fc_reduced(1.0 + 1e-7, v, 1, TAU).unwrap();
        let b = hg_fc_reduced(1.0 + 1e-7, v, 2, TAU).unwrap();
        assert_eq!(a, b);
        assert!(a.norm() > 0.0);
    }
}
