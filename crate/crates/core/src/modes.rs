//! Quasi-mode amplitudes A_n, the atom/quasi-mode coupling λ and the
//! normalization identities of the leaky resonator.
//!
//! The reservoir projection B(ω, k_z) is a distribution and is not
//! represented; the commutator it enters equals δ(k_z − k_z′) up to O(τ⁴).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{clustered_breaks, integrate, Estimate, QuadOptions};
use crate::setup::PhysicalSetup;
use crate::slab::Polarization;

/// A_n(ω,k) = (−τ/(2√(πℓ))) / (ω − ω_{n,k} − icτ²/(4ℓ)).
pub fn amplitude_a(setup: &PhysicalSetup, n: u32, omega: f64, k: f64) -> Complex64 {
    let wn = setup.quasimode_frequency_unchecked(n, k);
    amplitude_at(setup, omega - wn)
}

/// A_n as a function of the detuning ω − ω_{n,k}.
pub(crate) fn amplitude_at(setup: &PhysicalSetup, detuning: f64) -> Complex64 {
    let num = -setup.tau() / (2.0 * (PI * setup.length()).sqrt());
    num / Complex64::new(detuning, -setup.pole_halfwidth())
}

/// Peak value of |A_n|, 2√(ℓ/π)/(cτ).
pub fn amplitude_peak(setup: &PhysicalSetup) -> f64 {
    2.0 * (setup.length() / PI).sqrt() / (setup.c() * setup.tau())
}

/// |iτc√(π/ℓ)|A_n|² − (A_n* − A_n)| relative to |A_n* − A_n|.
pub fn identity_residual(setup: &PhysicalSetup, n: u32, omega: f64, k: f64) -> f64 {
    let a = amplitude_a(setup, n, omega, k);
    let lhs = Complex64::new(0.0, setup.tau() * setup.c() * (PI / setup.length()).sqrt() * a.norm_sqr());
    let rhs = a.conj() - a;
    (lhs - rhs).norm() / rhs.norm()
}

/// Radial part λ°_{α,n}(k) of the coupling for a dipole along x̂, so that
/// λ_{∥,n} = λ°_{∥,n} cosθ and λ_{⊥,n} = λ°_{⊥,n} sinθ, with θ measured
/// from the dipole.
pub fn coupling_radial(setup: &PhysicalSetup, alpha: Polarization, n: u32, k: f64) -> Complex64 {
    let parity = (f64::from(n) * PI / 2.0).sin();
    if n % 2 == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let wn = setup.quasimode_frequency_unchecked(n, k);
    let scale = 2.0 * setup.dipole_moment() * parity
        * (wn / (4.0 * PI * PI * setup.consts.epsilon0 * setup.length() * setup.consts.hbar)).sqrt();
    let geom = match alpha {
        Polarization::Perp => 1.0,
        Polarization::Par => f64::from(n) * setup.omega_c() / wn,
    };
    Complex64::new(0.0, scale * geom)
}

/// Angular factor of the coupling: cosθ for ∥, sinθ for ⊥.
pub fn angular(alpha: Polarization, theta: f64) -> f64 {
    match alpha {
        Polarization::Par => theta.cos(),
        Polarization::Perp => theta.sin(),
    }
}

/// λ_{α,n}(k_⊥) for an atom at the cavity centre.
pub fn coupling_lambda(setup: &PhysicalSetup, alpha: Polarization, n: u32, k: f64, theta: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::param("n", "branch index must be at least 1"));
    }
    if !(k >= 0.0) {
        return Err(Error::param("k", format!("must be non-negative, got {k}")));
    }
    Ok(coupling_radial(setup, alpha, n, k) * angular(alpha, theta))
}

/// ∫₀^∞ c|A_n(ω,k)|² dω by adaptive quadrature up to ω_{n,k} + 10⁶Γ and an
/// analytic Lorentzian tail beyond.
pub fn normalization_integral(setup: &PhysicalSetup, n: u32, k: f64) -> Result<Estimate<f64>> {
    if n == 0 {
        return Err(Error::param("n", "branch index must be at least 1"));
    }
    let wn = setup.quasimode_frequency_unchecked(n, k);
    let gamma = setup.pole_halfwidth();
    let top = wn + 1e6 * gamma;
    let c = setup.c();
    let f = |w: f64| c * amplitude_at(setup, w - wn).norm_sqr();
    let mut breaks = vec![0.0, top];
    breaks.extend(clustered_breaks(wn, gamma, 6, 0.0, top));
    let est = integrate(f, &breaks, QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 2000 })?;
    let tail = 0.5 - ((top - wn) / gamma).atan() / PI;
    Ok(Estimate { value: est.value + tail, ..est })
}

/// Full-line area of c|A_n|², peak height times πΓ.
pub fn normalization_full_line(setup: &PhysicalSetup) -> f64 {
    let g = setup.pole_halfwidth();
    let peak = setup.c() * amplitude_at(setup, 0.0).norm_sqr();
    peak * PI * g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slab::{mode_function_c, to_cartesian};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> PhysicalSetup {
        PhysicalSetup::cesium_d2(1).unwrap()
    }

    #[test]
    fn amplitude_at_pole() {
        let s = setup();
        let k = 1.3 * s.omega_c() / s.c();
        let wn = s.quasimode_frequency(3, k).unwrap();
        let a = amplitude_a(&s, 3, wn, k);
        assert_relative_eq!(a.norm(), amplitude_peak(&s), max_relative = 1e-14);
        assert_relative_eq!(
            amplitude_peak(&s),
            2.0 * (s.length() / PI).sqrt() / (s.c() * s.tau()),
            max_relative = 1e-15
        );
    }

    #[test]
    fn amplitude_far_wing() {
        let s = setup();
        let wn = s.omega_c();
        let d = 1e4 * s.pole_halfwidth();
        let a = amplitude_a(&s, 1, wn + d, 0.0).norm();
        let asym = s.tau() / (2.0 * (PI * s.length()).sqrt()) / d;
        assert_relative_eq!(a, asym, max_relative = 1e-7);
    }

    #[test]
    fn half_width() {
        let s = setup();
        let g = s.pole_halfwidth();
        let peak = amplitude_a(&s, 1, s.omega_c(), 0.0).norm_sqr();
        let half = amplitude_a(&s, 1, s.omega_c() + g, 0.0).norm_sqr();
        assert_relative_eq!(half, peak / 2.0, max_relative = 1e-6);
    }

    #[test]
    fn identity_random() {
        let s = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..8);
            let k = rng.gen_range(0.0..5.0) * s.omega_c() / s.c();
            let w = s.omega_c() * rng.gen_range(0.1..10.0);
            assert!(identity_residual(&s, n, w, k) < 1e-12);
        }
    }

    #[test]
    fn coupling_parity() {
        let s = setup();
        for n in [2, 4, 10] {
            for a in Polarization::BOTH {
                assert_eq!(coupling_lambda(&s, a, n, 1e6, 0.4).unwrap(), Complex64::new(0.0, 0.0));
            }
        }
        for n in [1, 3, 9] {
            assert!(coupling_lambda(&s, Polarization::Perp, n, 1e6, 0.4).unwrap().norm() > 0.0);
        }
        assert!(coupling_lambda(&s, Polarization::Perp, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn coupling_matches_mode_function() {
        // λ = −𝒟·sqrt(ω/(ε₀(2π)²ℓħ))·x̂·ũ_C(z = −ℓ/2).
        let s = setup();
        let z = -s.length() / 2.0;
        for (n, k, theta) in [(1u32, 0.0, PI / 2.0), (1, 3e6, 0.3), (3, 1.1e7, 2.0), (5, 2e5, -1.0)] {
            let wn = s.quasimode_frequency(n, k).unwrap();
            let pre = -s.dipole_moment()
                * (wn / (s.consts.epsilon0 * 4.0 * PI * PI * s.length() * s.consts.hbar)).sqrt();
            for a in Polarization::BOTH {
                let u = to_cartesian(&mode_function_c(&s, a, n, k, z).unwrap(), theta);
                let expect = u[0] * pre;
                let got = coupling_lambda(&s, a, n, k, theta).unwrap();
                assert!((got - expect).norm() <= 1e-13 * expect.norm().max(1e-30), "{a:?} n={n}");
            }
        }
        let wc = s.omega_c();
        let mag = 2.0 * s.dipole_moment()
            * (wc / (s.consts.epsilon0 * 4.0 * PI * PI * s.length() * s.consts.hbar)).sqrt();
        let got = coupling_lambda(&s, Polarization::Perp, 1, 0.0, PI / 2.0).unwrap().norm();
        assert_relative_eq!(got, mag, max_relative = 1e-14);
    }

    #[test]
    fn parallel_coupling_falls_off() {
        let s = setup();
        let kz = PI / s.length();
        let mut prev = f64::INFINITY;
        for k in [10.0, 100.0, 1000.0].map(|x| x * kz) {
            let v = coupling_radial(&s, Polarization::Par, 1, k).norm();
            let perp = coupling_radial(&s, Polarization::Perp, 1, k).norm();
            assert_relative_eq!(v / perp, kz / kz.hypot(k), max_relative = 1e-13);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn normalization_near_one() {
        let s = setup();
        for (n, kap) in [(1u32, 0.0), (5, 2.0), (3, 0.5), (2, 7.0)] {
            let k = kap * s.omega_c() / s.c();
            let v = normalization_integral(&s, n, k).unwrap().value;
            assert!((v - 1.0).abs() < 1e-6, "n={n} k={kap}: {v}");
        }
        assert_relative_eq!(normalization_full_line(&s), 1.0, max_relative = 1e-12);
    }
}
