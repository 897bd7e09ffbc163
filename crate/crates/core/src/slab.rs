//! Thin dielectric-slab mirror, its leaky limit, the resonator response
//! function and the reduced mode functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setup::{check_tau, PhysicalSetup};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Field polarization relative to the plane of incidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// TE, along ĥ_⊥ = ĥ_∥ × ẑ.
    Perp,
    /// TM, in the plane spanned by ẑ and ĥ_∥.
    Par,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Par, Polarization::Perp];

    /// Sign of the perfect-mirror reflectivity, m_⊥ = −1 and m_∥ = +1.
    pub fn mirror_sign(self) -> f64 {
        match self {
            Polarization::Perp => -1.0,
            Polarization::Par => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabResponse {
    pub t_perp: Complex64,
    pub t_par: Complex64,
    pub r_perp: Complex64,
    pub r_par: Complex64,
}

impl SlabResponse {
    pub fn t(&self, alpha: Polarization) -> Complex64 {
        match alpha {
            Polarization::Perp => self.t_perp,
            Polarization::Par => self.t_par,
        }
    }

    pub fn r(&self, alpha: Polarization) -> Complex64 {
        match alpha {
            Polarization::Perp => self.r_perp,
            Polarization::Par => self.r_par,
        }
    }
}

/// Transmissivity and reflectivity of a δ-thin slab of strength `eta` for a
/// wave with normal component `kz` and modulus `k_modulus`.
pub fn slab_response(eta: f64, kz: f64, k_modulus: f64) -> Result<SlabResponse> {
    if !(eta >= 0.0) {
        return Err(Error::param("eta", format!("must be non-negative, got {eta}")));
    }
    if !(kz > 0.0) {
        return Err(Error::param("kz", format!("must be positive (grazing incidence is degenerate), got {kz}")));
    }
    if !(k_modulus >= kz) {
        return Err(Error::param("k_modulus", format!("must be at least kz = {kz}, got {k_modulus}")));
    }
    let k2eta = I * (k_modulus * k_modulus * eta);
    let denom_perp = 2.0 * kz - k2eta;
    let kzeta = I * (kz * eta);
    if eta.is_infinite() {
        let one = Complex64::new(1.0, 0.0);
        return Ok(SlabResponse { t_perp: 0.0 * one, t_par: 0.0 * one, r_perp: -one, r_par: one });
    }
    Ok(SlabResponse {
        t_perp: 2.0 * kz / denom_perp,
        t_par: 2.0 / (2.0 - kzeta),
        r_perp: k2eta / denom_perp,
        r_par: kzeta / (kzeta - 2.0),
    })
}

/// Constant mirror coefficients of a slightly leaky mirror.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakyConstants {
    pub tau: f64,
    pub r_par: f64,
    pub r_perp: f64,
    pub t: Complex64,
}

pub fn leaky_constants(tau: f64) -> Result<LeakyConstants> {
    check_tau(tau)?;
    let r = (1.0 - tau * tau).sqrt();
    Ok(LeakyConstants { tau, r_par: r, r_perp: -r, t: Complex64::new(0.0, tau) })
}

impl LeakyConstants {
    pub fn r(&self, alpha: Polarization) -> f64 {
        match alpha {
            Polarization::Perp => self.r_perp,
            Polarization::Par => self.r_par,
        }
    }
}

/// Default truncation of the branch sum in [`spectral_response_l`].
pub fn default_n_max(u: f64) -> u32 {
    u.max(0.0).ceil() as u32 + 64
}

/// Pole expansion of the response function,
/// L(ω,k) ≈ (c/2ℓ) Σ_{n=0}^{n_max} (−τ)/(ω − ω_{n,k} + icτ²/(4ℓ)).
///
/// Fails if branch `n_max` does not lie above ω.
pub fn spectral_response_l(setup: &PhysicalSetup, omega: f64, k: f64, n_max: u32) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::param("omega", format!("must be positive, got {omega}")));
    }
    if !(k >= 0.0) {
        return Err(Error::param("k", format!("must be non-negative, got {k}")));
    }
    let top = setup.quasimode_frequency_unchecked(n_max, k);
    if top <= omega {
        return Err(Error::Truncation { n_max, u: setup.reduced(omega) });
    }
    let gamma = setup.pole_halfwidth();
    let tau = setup.tau();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..=n_max {
        let wn = setup.quasimode_frequency_unchecked(n, k);
        sum += -tau / Complex64::new(omega - wn, gamma);
    }
    Ok(sum * (setup.c() / (2.0 * setup.length())))
}

/// Closed form L = T/(1 − e^{2iℓkz} m R) of the leaky resonator, which is
/// the same for both polarizations.
pub fn spectral_response_exact(setup: &PhysicalSetup, kz: f64) -> Complex64 {
    let tau = setup.tau();
    let r = (1.0 - tau * tau).sqrt();
    let phase = Complex64::from_polar(1.0, 2.0 * setup.length() * kz);
    I * tau / (1.0 - r * phase)
}

/// Components along (ẑ, ĥ_∥, ĥ_⊥).
pub type ModeVector = [Complex64; 3];

fn reduced_mode(alpha: Polarization, kz: f64, k: f64, zeta: f64) -> ModeVector {
    let zero = Complex64::new(0.0, 0.0);
    let s = (kz * zeta).sin();
    match alpha {
        Polarization::Perp => [zero, zero, -2.0 * I * s],
        Polarization::Par => {
            let km = kz.hypot(k);
            let c = (kz * zeta).cos();
            [Complex64::new(2.0 * c * k / km, 0.0), -2.0 * I * s * (kz / km), zero]
        }
    }
}

/// Reduced intra-cavity mode function ũ_{α,C}(nπ/ℓ, k, z), −ℓ < z < 0.
pub fn mode_function_c(setup: &PhysicalSetup, alpha: Polarization, n: u32, k: f64, z: f64) -> Result<ModeVector> {
    if n == 0 {
        return Err(Error::param("n", "branch index must be at least 1"));
    }
    let l = setup.length();
    if !(z > -l && z < 0.0) {
        return Err(Error::param("z", format!("must lie inside the cavity (-{l:e}, 0), got {z:e}")));
    }
    let kz = f64::from(n) * PI / l;
    Ok(reduced_mode(alpha, kz, k, z + l))
}

/// Reduced outside mode function ũ_{α,O}(kz, k, z), z > 0.
pub fn mode_function_o(alpha: Polarization, kz: f64, k: f64, z: f64) -> Result<ModeVector> {
    if !(z >= 0.0) {
        return Err(Error::param("z", format!("must lie outside the cavity (z >= 0), got {z:e}")));
    }
    if !(kz > 0.0) {
        return Err(Error::param("kz", format!("must be positive, got {kz}")));
    }
    Ok(reduced_mode(alpha, kz, k, z))
}

/// Hermitian product a·b*.
pub fn inner(a: &ModeVector, b: &ModeVector) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Basis (ẑ, ĥ_∥, ĥ_⊥) to Cartesian (x, y, z), with ĥ_∥ = (cosθ, sinθ, 0).
pub fn to_cartesian(v: &ModeVector, theta: f64) -> ModeVector {
    let (s, c) = theta.sin_cos();
    [v[1] * c + v[2] * s, v[1] * s - v[2] * c, v[0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_complex, QuadOptions};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn slab_limits() {
        let s = slab_response(0.0, 1.0, 2.0).unwrap();
        for a in Polarization::BOTH {
            assert!(close(s.t(a), Complex64::new(1.0, 0.0), 1e-15));
            assert!(close(s.r(a), Complex64::new(0.0, 0.0), 1e-15));
        }
        let s = slab_response(1e12, 1.0, 2.0).unwrap();
        assert!(close(s.r_perp, Complex64::new(-1.0, 0.0), 1e-11));
        assert!(close(s.r_par, Complex64::new(1.0, 0.0), 1e-11));
        assert!(s.t_perp.norm() < 1e-11 && s.t_par.norm() < 1e-11);
        let s = slab_response(f64::INFINITY, 1.0, 2.0).unwrap();
        assert_eq!(s.r_perp, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn slab_worked_example() {
        // T_∥ = 2/(2 − 2i) = (1+i)/2, R_∥ = 2i/(2i − 2) = (1−i)/2.
        for km in [2.0, 3.5, 100.0] {
            let s = slab_response(1.0, 2.0, km).unwrap();
            assert!(close(s.t_par, Complex64::new(0.5, 0.5), 1e-15));
            assert!(close(s.r_par, Complex64::new(0.5, -0.5), 1e-15));
            assert!((s.t_par.norm_sqr() + s.r_par.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn slab_rejects() {
        assert!(slab_response(1.0, 0.0, 1.0).is_err());
        assert!(slab_response(-1.0, 1.0, 1.0).is_err());
        assert!(slab_response(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn leaky() {
        let c = leaky_constants(1e-3).unwrap();
        assert_eq!(c.r_par, (1.0f64 - 1e-6).sqrt());
        assert_eq!(c.r_perp, -c.r_par);
        assert_eq!(c.t, Complex64::new(0.0, 1e-3));
        let c = leaky_constants(0.005).unwrap();
        assert!((c.r_par * c.r_par + c.t.norm_sqr() - 1.0).abs() < 1e-15);
        let c = leaky_constants(1e-12).unwrap();
        assert!((c.r_par - 1.0).abs() < 1e-15 && (c.r_perp + 1.0).abs() < 1e-15);
        assert!(matches!(leaky_constants(0.02), Err(Error::LeakyRegime { .. })));
    }

    #[test]
    fn response_on_resonance() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let k = 0.7 * s.omega_c() / s.c();
        for n in [1u32, 2, 3] {
            let wn = s.quasimode_frequency(n, k).unwrap();
            let l = spectral_response_l(&s, wn, k, default_n_max(s.reduced(wn))).unwrap();
            // Dominant term is exactly (c/2ℓ)(−τ)/(iΓ) = 2i/τ.
            let dominant = 2.0 / s.tau();
            assert!((l.norm() - dominant).abs() / dominant < 1e-3);
        }
    }

    #[test]
    fn response_between_branches() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let l = spectral_response_l(&s, 1.5 * s.omega_c(), 0.0, default_n_max(1.5)).unwrap();
        assert!(l.norm() > 1e-4 && l.norm() < 1.0);
        let exact = spectral_response_exact(&s, 1.5 * s.omega_c() / s.c());
        assert!(exact.norm() < 1e-2);
    }

    #[test]
    fn response_width_scaling() {
        let a = PhysicalSetup::cesium_d2(1).unwrap();
        let b = a.with_tau(2e-3).unwrap();
        let wa = a.omega_c();
        let la = spectral_response_l(&a, wa, 0.0, 65).unwrap().norm();
        let lb = spectral_response_l(&b, wa, 0.0, 65).unwrap().norm();
        assert!((la / lb - 2.0).abs() < 1e-3);
    }

    #[test]
    fn exact_matches_expansion_near_pole() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let d = s.pole_halfwidth();
        for off in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            let w = s.omega_c() + off * d;
            let approx = spectral_response_l(&s, w, 0.0, 65).unwrap();
            let exact = spectral_response_exact(&s, w / s.c());
            assert!((approx - exact).norm() / exact.norm() < 1e-3, "offset {off}");
        }
    }

    #[test]
    fn truncation_error() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        assert!(matches!(
            spectral_response_l(&s, 5.5 * s.omega_c(), 0.0, 5),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn mode_at_center() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let z = -s.length() / 2.0;
        for n in [2, 4, 6] {
            let v = mode_function_c(&s, Polarization::Perp, n, 1e6, z).unwrap();
            assert!(v.iter().all(|x| x.norm() < 1e-14));
        }
        let v = mode_function_c(&s, Polarization::Perp, 1, 1e6, z).unwrap();
        assert!((v[2].norm() - 2.0).abs() < 1e-15);
        assert!(v[0].norm() == 0.0 && v[1].norm() == 0.0);
        assert!(mode_function_c(&s, Polarization::Perp, 1, 0.0, 0.0).is_err());
        assert!(mode_function_c(&s, Polarization::Perp, 1, 0.0, -2.0 * s.length()).is_err());
    }

    #[test]
    fn orthogonality_inside() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let l = s.length();
        let k = 2.0 * s.omega_c() / s.c();
        let opts = QuadOptions { abs_tol: 1e-12 * l, rel_tol: 1e-12, max_intervals: 200 };
        for (a, b, n, m, expect) in [
            (Polarization::Perp, Polarization::Perp, 1, 3, 0.0),
            (Polarization::Perp, Polarization::Perp, 2, 2, 2.0 * l),
            (Polarization::Par, Polarization::Par, 3, 3, 2.0 * l),
            (Polarization::Par, Polarization::Par, 1, 2, 0.0),
            (Polarization::Par, Polarization::Perp, 1, 1, 0.0),
        ] {
            let f = |z: f64| {
                let z = z.clamp(-l * (1.0 - 1e-15), -l * 1e-15);
                inner(
                    &mode_function_c(&s, a, n, k, z).unwrap(),
                    &mode_function_c(&s, b, m, k, z).unwrap(),
                )
            };
            let v = integrate_complex(f, &[-l, -l / 2.0, 0.0], opts).unwrap().value;
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-8 * 2.0 * l, "{a:?}{b:?}{n}{m}");
        }
    }

    #[test]
    fn cartesian_projection() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let theta = 0.3;
        let v = mode_function_c(&s, Polarization::Perp, 1, 1e5, -s.length() / 2.0).unwrap();
        let x = to_cartesian(&v, theta);
        // x̂·ĥ_⊥ = sinθ.
        assert!((x[0] - v[2] * theta.sin()).norm() < 1e-15);
    }
}
