//! Direct evaluation of the form-factors from λ, A_n and the profile by
//! radial quadrature in κ = kc/ω_c. The angular integrals of cos² and sin²
//! contribute π each.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::closed::{check_args, odd_branches};
use crate::error::Result;
use crate::modes::{amplitude_a, coupling_radial};
use crate::profiles::LateralProfile;
use crate::quad::{integrate, integrate_complex, QuadOptions};
use crate::setup::PhysicalSetup;
use crate::slab::Polarization;

const DECADES: u32 = 9;

/// Breakpoints in κ resolving the poles of A_n at reduced frequency `u` on
/// every odd branch n ≤ `n_max`, plus the branch edges at κ = 0.
pub fn kappa_breaks(u: f64, n_max: u32, delta: f64, kappa_max: f64) -> Vec<f64> {
    let mut out = vec![0.0, kappa_max];
    for n in odd_branches(n_max) {
        let n = f64::from(n);
        let mut d = delta;
        for _ in 0..DECADES + 2 {
            let edge = ((n + d).powi(2) - n * n).sqrt();
            if edge < kappa_max {
                out.push(edge);
            }
            d *= 10.0;
        }
        if u > n {
            let kp = ((u - n) * (u + n)).sqrt();
            let width = (delta * u / kp).min(kp);
            out.push(kp);
            let mut d = width;
            for _ in 0..DECADES {
                out.extend([kp - d, kp + d]);
                d *= 10.0;
            }
        }
    }
    out.retain(|&x| (0.0..=kappa_max).contains(&x));
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn options() -> QuadOptions {
    QuadOptions { abs_tol: 0.0, rel_tol: 1e-9, max_intervals: 20_000 }
}

/// c·Σ_α ∫d²k |Σ_n λ_{α,n} A*_n(ω,k)|², cut off at κ = u + 1.
pub fn total_ff_quadrature(setup: &PhysicalSetup, omega: f64, n_max: u32) -> Result<f64> {
    check_args(omega, n_max)?;
    let u = setup.reduced(omega);
    let kc = setup.omega_c() / setup.c();
    let kmax = u + 1.0;
    let breaks = kappa_breaks(u, n_max, setup.reduced_halfwidth(), kmax);
    let f = |kap: f64| {
        let k = kap * kc;
        let mut s = 0.0;
        for alpha in Polarization::BOTH {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in odd_branches(n_max) {
                acc += coupling_radial(setup, alpha, n, k) * amplitude_a(setup, n, omega, k).conj();
            }
            s += acc.norm_sqr();
        }
        PI * k * kc * s
    };
    let est = integrate(f, &breaks, options())?;
    Ok(setup.c() * est.value)
}

/// Σ_{n,α} ∫d²k λ_{α,n} φ̃_α A_n(ω,k), the amplitude inside F_C.
pub fn cavity_amplitude_quadrature(
    setup: &PhysicalSetup,
    omega: f64,
    profile: &LateralProfile,
    n_max: u32,
) -> Result<Complex64> {
    check_args(omega, n_max)?;
    let u = setup.reduced(omega);
    let kc = setup.omega_c() / setup.c();
    let delta = setup.reduced_halfwidth();
    let mut kmax = profile.kappa_cutoff(setup);
    let mut breaks = Vec::new();
    if let LateralProfile::Optimal { f, n_branches, .. } = *profile {
        let v = setup.reduced(f);
        kmax = kmax.max(u + 1.0);
        breaks.extend(kappa_breaks(v, n_branches, delta, kmax));
    }
    breaks.extend(kappa_breaks(u, n_max, delta, kmax));
    let f = |kap: f64| {
        let k = kap * kc;
        let mut acc = Complex64::new(0.0, 0.0);
        for alpha in Polarization::BOTH {
            let phi = profile.radial(setup, alpha, k);
            if phi == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut lam_a = Complex64::new(0.0, 0.0);
            for n in odd_branches(n_max) {
                lam_a += coupling_radial(setup, alpha, n, k) * amplitude_a(setup, n, omega, k);
            }
            acc += lam_a * phi;
        }
        acc * (PI * k * kc)
    };
    Ok(integrate_complex(f, &breaks, options())?.value)
}

/// c·|Σ_{n,α} ∫d²k λ_{α,n} φ̃_α A_n(ω,k)|².
pub fn cavity_ff_quadrature(
    setup: &PhysicalSetup,
    omega: f64,
    profile: &LateralProfile,
    n_max: u32,
) -> Result<f64> {
    let amp = cavity_amplitude_quadrature(setup, omega, profile, n_max)?;
    Ok(setup.c() * amp.norm_sqr())
}
