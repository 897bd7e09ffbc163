//! Total, cavity and non-cavity form-factors, each available as a reduced
//! closed form and as a direct quadrature of the coupling products.

mod closed;
mod grid;
mod quadrature;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::LateralProfile;
use crate::setup::PhysicalSetup;

pub use closed::{
    cavity_ff_hg, cavity_ff_optimal_closed, hg_fc_reduced, noncavity_optimal_closed, optimal_fc_reduced,
    optimal_fc_reduced_linear_coefficient, optimal_gram_reduced, total_ff_closed, total_ff_reduced,
    total_ff_reduced_from_fc,
};
pub use grid::{peak_adaptive_grid, trapezoid_weights, GridSpec};
pub use quadrature::{cavity_amplitude_quadrature, cavity_ff_quadrature, kappa_breaks, total_ff_quadrature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Total,
    Cavity,
    Noncavity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Quadrature,
}

/// What to evaluate on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "profile", rename_all = "lowercase")]
pub enum Target {
    Total,
    Cavity(LateralProfile),
    Noncavity(LateralProfile),
}

impl Target {
    pub fn kind(&self) -> Kind {
        match self {
            Target::Total => Kind::Total,
            Target::Cavity(_) => Kind::Cavity,
            Target::Noncavity(_) => Kind::Noncavity,
        }
    }

    pub fn profile(&self) -> Option<&LateralProfile> {
        match self {
            Target::Total => None,
            Target::Cavity(p) | Target::Noncavity(p) => Some(p),
        }
    }
}

/// Cavity form-factor by the profile's reduced closed form.
pub fn cavity_ff_closed(setup: &PhysicalSetup, omega: f64, profile: &LateralProfile, n_max: u32) -> Result<f64> {
    match *profile {
        LateralProfile::Optimal { f, .. } => cavity_ff_optimal_closed(setup, omega, f, n_max),
        LateralProfile::HermiteGauss { waist } => cavity_ff_hg(setup, omega, waist, n_max),
    }
}

/// Value of `target` at `omega` [rad/s], in rad/s. Non-cavity values are
/// returned unclamped.
pub fn evaluate(setup: &PhysicalSetup, target: &Target, omega: f64, n_max: u32, method: Method) -> Result<f64> {
    match (target, method) {
        (Target::Total, Method::Closed) => total_ff_closed(setup, omega, n_max),
        (Target::Total, Method::Quadrature) => total_ff_quadrature(setup, omega, n_max),
        (Target::Cavity(p), Method::Closed) => cavity_ff_closed(setup, omega, p, n_max),
        (Target::Cavity(p), Method::Quadrature) => cavity_ff_quadrature(setup, omega, p, n_max),
        (Target::Noncavity(p), Method::Closed) => match *p {
            LateralProfile::Optimal { f, .. } => noncavity_optimal_closed(setup, omega, f, n_max),
            LateralProfile::HermiteGauss { waist } => {
                Ok(total_ff_closed(setup, omega, n_max)? - cavity_ff_hg(setup, omega, waist, n_max)?)
            }
        },
        (Target::Noncavity(p), Method::Quadrature) => {
            Ok(total_ff_quadrature(setup, omega, n_max)? - cavity_ff_quadrature(setup, omega, p, n_max)?)
        }
    }
}

/// γ(ω) = F_T − F_C with an explicit record of clamping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonCavity {
    /// max(raw, 0).
    pub value: f64,
    /// F_T − F_C as computed.
    pub raw: f64,
    /// Set when `raw` was negative and has been clamped to zero.
    pub clamped: bool,
}

/// Non-cavity form-factor by the closed forms.
pub fn noncavity_ff(setup: &PhysicalSetup, omega: f64, profile: &LateralProfile, n_max: u32) -> Result<NonCavity> {
    let raw = evaluate(setup, &Target::Noncavity(*profile), omega, n_max, Method::Closed)?;
    let clamped = raw < 0.0;
    if clamped {
        log::debug!("non-cavity form-factor {raw:e} rad/s clamped to zero at u = {}", setup.reduced(omega));
    }
    Ok(NonCavity { value: raw.max(0.0), raw, clamped })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub n_branches: u32,
    pub n_wavelengths: u32,
    pub tau: f64,
    pub omega_c: f64,
    pub profile: Option<LateralProfile>,
    pub profile_label: Option<String>,
}

/// One closed-form value checked against quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditPoint {
    pub u: f64,
    pub closed: f64,
    pub quadrature: f64,
    pub rel_diff: f64,
}

/// Relative disagreement above which the audit rejects the closed form.
pub const AUDIT_TOLERANCE: f64 = 1e-2;
const AUDIT_POINTS: usize = 5;
const AUDIT_SPAN: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormFactorCurve {
    pub kind: Kind,
    pub method: Method,
    pub params: CurveParams,
    /// Reduced frequencies, strictly increasing.
    pub u: Vec<f64>,
    /// ω = u·ω_c [rad/s].
    pub omega: Vec<f64>,
    /// Form-factor [rad/s].
    pub values: Vec<f64>,
    pub audit: Vec<AuditPoint>,
    /// The closed form failed its audit and the curve was recomputed by quadrature.
    pub fell_back: bool,
}

impl FormFactorCurve {
    /// Evaluates `target` at every reduced frequency of `grid` in parallel.
    pub fn build(setup: &PhysicalSetup, target: &Target, n_max: u32, grid: &[f64], method: Method) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::param("grid", "no points"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("grid", "must be strictly increasing"));
        }
        let values = eval_all(setup, target, n_max, grid, method)?;
        let params = CurveParams {
            n_branches: n_max,
            n_wavelengths: setup.n_wavelengths(),
            tau: setup.tau(),
            omega_c: setup.omega_c(),
            profile: target.profile().copied(),
            profile_label: target.profile().map(|p| p.describe(setup)),
        };
        let mut curve = Self {
            kind: target.kind(),
            method,
            params,
            u: grid.to_vec(),
            omega: grid.iter().map(|&u| setup.angular(u)).collect(),
            values,
            audit: Vec::new(),
            fell_back: false,
        };
        if method == Method::Closed {
            if let Target::Cavity(LateralProfile::Optimal { f, .. }) = target {
                curve.audit_optimal(setup, target, n_max, setup.reduced(*f))?;
            }
        }
        Ok(curve)
    }

    fn audit_optimal(&mut self, setup: &PhysicalSetup, target: &Target, n_max: u32, v: f64) -> Result<()> {
        let span = AUDIT_SPAN * setup.reduced_halfwidth();
        let near: Vec<usize> = (0..self.u.len()).filter(|&i| (self.u[i] - v).abs() <= span).collect();
        if near.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ u64::from(n_max) ^ v.to_bits());
        let picks: Vec<usize> = (0..AUDIT_POINTS).map(|_| near[rng.gen_range(0..near.len())]).collect();
        let audit = picks
            .par_iter()
            .map(|&i| {
                let q = evaluate(setup, target, self.omega[i], n_max, Method::Quadrature)?;
                let c = self.values[i];
                Ok(AuditPoint { u: self.u[i], closed: c, quadrature: q, rel_diff: (c - q).abs() / q.abs().max(f64::MIN_POSITIVE) })
            })
            .collect::<Result<Vec<_>>>()?;
        let failed = audit.iter().any(|a| !(a.rel_diff <= AUDIT_TOLERANCE));
        self.audit = audit;
        if failed {
            log::warn!("closed-form optimal cavity form-factor failed its quadrature audit; recomputing by quadrature");
            self.values = eval_all(setup, target, n_max, &self.u, Method::Quadrature)?;
            self.method = Method::Quadrature;
            self.fell_back = true;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "u,omega_rad_per_s,value_rad_per_s")?;
        for i in 0..self.u.len() {
            writeln!(out, "{:.11e},{:.11e},{:.11e}", self.u[i], self.omega[i], self.values[i])?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }

    /// Index of the largest value.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] > self.values[best] {
                best = i;
            }
        }
        best
    }
}

fn eval_all(setup: &PhysicalSetup, target: &Target, n_max: u32, grid: &[f64], method: Method) -> Result<Vec<f64>> {
    grid.par_iter()
        .map(|&u| evaluate(setup, target, setup.angular(u), n_max, method))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let c = FormFactorCurve::build(&s, &Target::Total, 1, &[0.9, 1.0, 1.1], Method::Closed).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "u,omega_rad_per_s,value_rad_per_s");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("1.00000000000e0,"));
        let k: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
        assert!((k / s.prefactor_k() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_grids() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        assert!(FormFactorCurve::build(&s, &Target::Total, 1, &[], Method::Closed).is_err());
        assert!(FormFactorCurve::build(&s, &Target::Total, 1, &[1.0, 0.9], Method::Closed).is_err());
    }

    #[test]
    fn optimal_curve_passes_audit() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let p = LateralProfile::optimal(&s, s.omega_a(), 1).unwrap();
        let grid = peak_adaptive_grid(&GridSpec { cluster_points: 201, tail_points: 50, ..GridSpec::new(0.5, 2.0, vec![1.0]) }, s.reduced_halfwidth()).unwrap();
        let c = FormFactorCurve::build(&s, &Target::Cavity(p), 1, &grid, Method::Closed).unwrap();
        assert_eq!(c.audit.len(), AUDIT_POINTS);
        assert!(!c.fell_back);
        assert!(c.audit.iter().all(|a| a.rel_diff < 1e-4));
        let peak = c.u[c.argmax()];
        assert!((peak - 1.0).abs() < 100.0 * s.reduced_halfwidth());
    }

    #[test]
    fn noncavity_vanishes_at_optimal_centre() {
        let s = PhysicalSetup::cesium_d2(3).unwrap();
        let p = LateralProfile::optimal(&s, s.omega_a(), 3).unwrap();
        let nc = noncavity_ff(&s, s.omega_a(), &p, 3).unwrap();
        assert_eq!(nc.value, 0.0);
        assert!(!nc.clamped);
    }

    #[test]
    fn hg_noncavity_is_positive_off_peak() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let p = LateralProfile::hermite_gauss(500e-6).unwrap();
        let nc = noncavity_ff(&s, 0.99 * s.omega_a(), &p, 1).unwrap();
        assert!(nc.value > 0.0 && !nc.clamped);
    }
}
