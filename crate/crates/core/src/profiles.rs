//! Lateral pulse profiles in reciprocal space.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formfactor::{kappa_breaks, total_ff_reduced};
use crate::modes::{amplitude_a, angular, coupling_radial};
use crate::quad::{integrate, Estimate, QuadOptions};
use crate::setup::PhysicalSetup;
use crate::slab::Polarization;

/// Gaussian factor below which HG integrands are dropped: e^{−74/2} ≈ 10⁻¹⁶.
pub const HG_EXPONENT_CUTOFF: f64 = 74.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum LateralProfile {
    /// Decay-suppressing profile centred at `f` [rad/s] over branches ≤ `n_branches`.
    Optimal {
        f: f64,
        n_branches: u32,
        /// sqrt(F_T(f)/c), fixed at construction.
        norm: f64,
    },
    /// TEM₁₀ (∥) / TEM₀₁ (⊥) pair of waist `waist` [m].
    HermiteGauss { waist: f64 },
}

impl LateralProfile {
    pub fn optimal(setup: &PhysicalSetup, f: f64, n_branches: u32) -> Result<Self> {
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::param("f", format!("must be positive, got {f}")));
        }
        if n_branches == 0 {
            return Err(Error::param("N", "must be a positive integer"));
        }
        let ft = setup.prefactor_k() * total_ff_reduced(setup.reduced(f), n_branches, setup.tau());
        if !(ft > 0.0 && ft.is_finite()) {
            return Err(Error::UndefinedProfile { v: setup.reduced(f) });
        }
        Ok(LateralProfile::Optimal { f, n_branches, norm: (ft / setup.c()).sqrt() })
    }

    pub fn hermite_gauss(waist: f64) -> Result<Self> {
        if !(waist > 0.0 && waist.is_finite()) {
            return Err(Error::param("waist", format!("must be positive, got {waist}")));
        }
        Ok(LateralProfile::HermiteGauss { waist })
    }

    /// Radial factor φ°_α(k); the full profile is φ°_α·cosθ (∥) or φ°_α·sinθ (⊥).
    pub fn radial(&self, setup: &PhysicalSetup, alpha: Polarization, k: f64) -> Complex64 {
        match *self {
            LateralProfile::Optimal { f, n_branches, norm } => {
                let mut s = Complex64::new(0.0, 0.0);
                for n in (1..=n_branches).step_by(2) {
                    s += (coupling_radial(setup, alpha, n, k) * amplitude_a(setup, n, f, k)).conj();
                }
                s / norm
            }
            LateralProfile::HermiteGauss { waist } => hermite_gauss_radial(waist, k),
        }
    }

    pub fn evaluate(&self, setup: &PhysicalSetup, alpha: Polarization, k: f64, theta: f64) -> Complex64 {
        self.radial(setup, alpha, k) * angular(alpha, theta)
    }

    /// Short human-readable tag.
    pub fn describe(&self, setup: &PhysicalSetup) -> String {
        match *self {
            LateralProfile::Optimal { f, n_branches, .. } => {
                format!("optimal(f={:.6} w_c, N={n_branches})", setup.reduced(f))
            }
            LateralProfile::HermiteGauss { waist } => format!("hermite-gauss(w={:.1} um)", waist * 1e6),
        }
    }

    /// Reduced radial cutoff κ = kc/ω_c beyond which the profile is
    /// negligible for quadrature purposes.
    pub fn kappa_cutoff(&self, setup: &PhysicalSetup) -> f64 {
        match *self {
            LateralProfile::Optimal { f, .. } => setup.reduced(f) + 1.0,
            LateralProfile::HermiteGauss { waist } => HG_EXPONENT_CUTOFF.sqrt() / setup.reduced_waist(waist),
        }
    }
}

pub fn hermite_gauss_radial(waist: f64, k: f64) -> Complex64 {
    let a = waist * waist * k / PI.sqrt() * (-0.5 * waist * waist * k * k).exp();
    Complex64::new(0.0, -a)
}

/// φ̃^G_α(k_⊥) = (w²k/(i√π))·e^{−w²k²/2}·(cosθ δ_{α,∥} + sinθ δ_{α,⊥}).
pub fn hermite_gauss_profile(waist: f64, alpha: Polarization, k: f64, theta: f64) -> Result<Complex64> {
    if !(waist > 0.0) {
        return Err(Error::param("waist", format!("must be positive, got {waist}")));
    }
    Ok(hermite_gauss_radial(waist, k) * angular(alpha, theta))
}

/// φ̃^opt_α for the given centre frequency and branch count.
pub fn optimal_profile(
    setup: &PhysicalSetup,
    f: f64,
    n_branches: u32,
    alpha: Polarization,
    k: f64,
    theta: f64,
) -> Result<Complex64> {
    Ok(LateralProfile::optimal(setup, f, n_branches)?.evaluate(setup, alpha, k, theta))
}

/// 1D Hermite-Gauss function F_n(z, w) for n ∈ {0, 1}.
fn hg_1d(order: u32, z: f64, w: f64) -> f64 {
    let x = z / w;
    let h = if order == 0 { 1.0 } else { 2.0 * x };
    let fact = 1.0;
    (2.0 / PI).powf(0.25) * (1.0 / (2f64.powf(f64::from(order) + 0.5) * fact * w)).sqrt() * h * (-0.5 * x * x).exp()
}

/// Real-space beam: F₁(x)F₀(y)/√2 for ∥, F₀(x)F₁(y)/√2 for ⊥.
pub fn real_space_hg(x: f64, y: f64, waist: f64, alpha: Polarization) -> Result<f64> {
    if !(waist > 0.0) {
        return Err(Error::param("waist", format!("must be positive, got {waist}")));
    }
    let (ox, oy) = match alpha {
        Polarization::Par => (1, 0),
        Polarization::Perp => (0, 1),
    };
    Ok(hg_1d(ox, x, waist) * hg_1d(oy, y, waist) / 2f64.sqrt())
}

/// Σ_α ∫d²k |φ̃_α|², with the angular integrals done analytically.
pub fn profile_norm(setup: &PhysicalSetup, profile: &LateralProfile) -> Result<Estimate<f64>> {
    let kc = setup.omega_c() / setup.c();
    let kmax = profile.kappa_cutoff(setup);
    let breaks = match *profile {
        LateralProfile::Optimal { f, n_branches, .. } => {
            kappa_breaks(setup.reduced(f), n_branches, setup.reduced_halfwidth(), kmax)
        }
        LateralProfile::HermiteGauss { waist } => {
            let peak = (1.5f64).sqrt() / setup.reduced_waist(waist);
            vec![0.0, peak, kmax]
        }
    };
    let f = |kap: f64| {
        let k = kap * kc;
        let p = profile.radial(setup, Polarization::Par, k).norm_sqr()
            + profile.radial(setup, Polarization::Perp, k).norm_sqr();
        PI * k * kc * p
    };
    integrate(f, &breaks, QuadOptions::rel(1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hg_normalized() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        for w in [50e-6, 100e-6, 500e-6] {
            let p = LateralProfile::hermite_gauss(w).unwrap();
            let v = profile_norm(&s, &p).unwrap().value;
            assert!((v - 1.0).abs() < 1e-8, "w={w}: {v}");
        }
    }

    #[test]
    fn hg_axis_node_and_peak() {
        let w = 2e-4;
        for a in Polarization::BOTH {
            assert_eq!(hermite_gauss_profile(w, a, 0.0, 0.7).unwrap().norm(), 0.0);
        }
        // Golden-section maximum of k³e^{−w²k²}.
        let f = |k: f64| k.powi(3) * (-w * w * k * k).exp();
        let (mut a, mut b) = (0.0, 10.0 / w);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        assert_relative_eq!(0.5 * (a + b), 1.5f64.sqrt() / w, max_relative = 1e-8);
    }

    #[test]
    fn hg_angular_structure() {
        let w = 1e-4;
        let k = 1e4;
        let par = hermite_gauss_profile(w, Polarization::Par, k, 0.0).unwrap();
        let perp = hermite_gauss_profile(w, Polarization::Perp, k, PI / 2.0).unwrap();
        assert_relative_eq!(par.norm(), perp.norm(), max_relative = 1e-15);
        assert!(hermite_gauss_profile(w, Polarization::Perp, k, 0.0).unwrap().norm() < 1e-20);
        assert!(hermite_gauss_profile(-1.0, Polarization::Par, k, 0.0).is_err());
    }

    #[test]
    fn real_space_normalized() {
        let w = 3e-4;
        let n = 801;
        let h = 16.0 * w / (n as f64 - 1.0);
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = -8.0 * w + h * i as f64;
                let y = -8.0 * w + h * j as f64;
                let a = real_space_hg(x, y, w, Polarization::Par).unwrap();
                let b = real_space_hg(x, y, w, Polarization::Perp).unwrap();
                sum += (a * a + b * b) * h * h;
            }
        }
        assert!((sum - 1.0).abs() < 1e-8, "{sum}");
        for y in [-1e-4, 0.0, 2e-4] {
            assert_eq!(real_space_hg(0.0, y, w, Polarization::Par).unwrap(), 0.0);
        }
    }

    #[test]
    fn fourier_consistency() {
        // φ̃(k) = (1/2π)∫∫ φ(x,y) e^{−i(k_x x + k_y y)} dx dy by a Riemann sum.
        let w = 1e-4;
        let n = 401;
        let h = 16.0 * w / (n as f64 - 1.0);
        for (k, theta) in [(5e3, 0.2), (1.2e4, 1.9), (2e4, -0.7)] {
            let (kx, ky) = (k * f64::cos(theta), k * f64::sin(theta));
            for a in Polarization::BOTH {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let x = -8.0 * w + h * i as f64;
                    for j in 0..n {
                        let y = -8.0 * w + h * j as f64;
                        let v = real_space_hg(x, y, w, a).unwrap();
                        acc += Complex64::from_polar(v, -(kx * x + ky * y));
                    }
                }
                acc *= h * h / (2.0 * PI);
                let expect = hermite_gauss_profile(w, a, k, theta).unwrap();
                assert!((acc - expect).norm() < 1e-9 * w, "{a:?} k={k}");
            }
        }
    }

    #[test]
    fn optimal_normalized() {
        for (n, f_u) in [(1u32, 1.0), (3, 3.0), (3, 2.2)] {
            let s = PhysicalSetup::cesium_d2(n).unwrap();
            let p = LateralProfile::optimal(&s, f_u * s.omega_c(), n).unwrap();
            let v = profile_norm(&s, &p).unwrap().value;
            assert!((v - 1.0).abs() < 1e-6, "N={n} f={f_u}: {v}");
        }
    }

    #[test]
    fn optimal_even_branches_silent() {
        let s = PhysicalSetup::cesium_d2(3).unwrap();
        let f = 3.0 * s.omega_c();
        let k = 1e5;
        let p3 = LateralProfile::Optimal { f, n_branches: 3, norm: 1.0 };
        let p4 = LateralProfile::Optimal { f, n_branches: 4, norm: 1.0 };
        for a in Polarization::BOTH {
            assert_eq!(p3.radial(&s, a, k), p4.radial(&s, a, k));
        }
        assert!(LateralProfile::optimal(&s, 0.0, 3).is_err());
        assert!(LateralProfile::optimal(&s, f, 0).is_err());
    }
}
