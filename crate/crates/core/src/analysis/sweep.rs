//! Parameter sweeps over N (optimal profile) and over the waist
//! (Hermite-Gauss profile).

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::triplet::{default_gamma_freq, extract_triplet_at, highest_odd_branch, CqedTriplet, TripletOptions};
use crate::error::{Error, Result};
use crate::profiles::LateralProfile;
use crate::setup::PhysicalSetup;

/// Largest N accepted by `sweep_n`.
pub const SWEEP_N_MAX: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Number of half-wavelengths N [dimensionless].
    N,
    /// Beam waist w [m].
    Waist,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub triplet: Option<CqedTriplet>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn residual(&self) -> Option<f64> {
        self.triplet.as_ref().map(|t| t.fit.residual)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    /// Fixed N of a waist sweep.
    pub n_wavelengths: Option<u32>,
    pub rows: Vec<SweepRow>,
    /// First swept value with κ < g.
    pub crossing: Option<f64>,
}

impl SweepResult {
    fn new(axis: SweepAxis, n_wavelengths: Option<u32>, rows: Vec<SweepRow>) -> Self {
        let crossing = rows
            .iter()
            .find(|r| r.triplet.as_ref().is_some_and(|t| t.kappa < t.g))
            .map(|r| r.value);
        Self { axis, n_wavelengths, rows, crossing }
    }

    pub fn succeeded(&self) -> usize {
        self.rows.iter().filter(|r| r.triplet.is_some()).count()
    }

    pub fn success_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.succeeded() as f64 / self.rows.len() as f64
        }
    }

    /// Failed rows carry NaN in every numeric column.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "sweep_value,g_rad_s,kappa_rad_s,gamma_rad_s,residual")?;
        for row in &self.rows {
            let (g, k, gm, r) = match &row.triplet {
                Some(t) => (t.g, t.kappa, t.gamma, t.fit.residual),
                None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            };
            writeln!(out, "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}", row.value, g, k, gm, r)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }
}

fn row<F: FnOnce() -> Result<CqedTriplet>>(value: f64, f: F) -> SweepRow {
    match f() {
        Ok(t) => SweepRow { value, triplet: Some(t), error: None },
        Err(e) => {
            log::warn!("sweep point {value:e} failed: {e}");
            SweepRow { value, triplet: None, error: Some(e.to_string()) }
        }
    }
}

/// Optimal-profile triplets at f = ω_a = N·ω_c for each N, all other
/// parameters taken from `base`.
pub fn sweep_n(base: &PhysicalSetup, n_list: &[u32], opts: &TripletOptions) -> Result<SweepResult> {
    if n_list.is_empty() {
        return Err(Error::param("N list", "empty"));
    }
    for &n in n_list {
        if n % 2 == 0 || n > SWEEP_N_MAX {
            return Err(Error::param("N list", format!("{n} is not an odd integer in [1, {SWEEP_N_MAX}]")));
        }
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("N list", "must be strictly increasing"));
    }
    let rows = n_list
        .par_iter()
        .map(|&n| {
            row(f64::from(n), || {
                let setup = base.with_n_wavelengths(n)?;
                let f = setup.omega_a();
                let profile = LateralProfile::optimal(&setup, f, n)?;
                Ok(extract_triplet_at(&setup, &profile, n, setup.reduced(f), f, opts)?.triplet)
            })
        })
        .collect();
    Ok(SweepResult::new(SweepAxis::N, None, rows))
}

/// Hermite-Gauss triplets at the highest odd branch for each waist [m],
/// with γ at 0.99·ω_a.
pub fn sweep_w(setup: &PhysicalSetup, w_list: &[f64], opts: &TripletOptions) -> Result<SweepResult> {
    if w_list.is_empty() {
        return Err(Error::param("waist list", "empty"));
    }
    if w_list.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::param("waist list", "waists must be positive"));
    }
    if w_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("waist list", "must be strictly increasing"));
    }
    let n = setup.n_wavelengths();
    let branch = f64::from(highest_odd_branch(n)?);
    let rows = w_list
        .par_iter()
        .map(|&w| {
            row(w, || {
                let profile = LateralProfile::hermite_gauss(w)?;
                let gf = default_gamma_freq(setup, &profile);
                Ok(extract_triplet_at(setup, &profile, n, branch, gf, opts)?.triplet)
            })
        })
        .collect();
    Ok(SweepResult::new(SweepAxis::Waist, Some(n), rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lists() {
        let s = PhysicalSetup::cesium_d2(1).unwrap();
        let o = TripletOptions::default();
        assert!(sweep_n(&s, &[], &o).is_err());
        assert!(sweep_n(&s, &[1, 2], &o).is_err());
        assert!(sweep_n(&s, &[3, 1], &o).is_err());
        assert!(sweep_n(&s, &[101], &o).is_err());
        assert!(sweep_w(&s, &[], &o).is_err());
        assert!(sweep_w(&s, &[2e-4, 1e-4], &o).is_err());
        assert!(sweep_w(&s, &[-1e-4], &o).is_err());
    }

    #[test]
    fn failed_rows_are_nan() {
        let r = SweepResult::new(SweepAxis::N, None, vec![SweepRow { value: 3.0, triplet: None, error: Some("x".into()) }]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.lines().nth(1).unwrap().ends_with("NaN,NaN,NaN,NaN"));
        assert_eq!(r.crossing, None);
        assert_eq!(r.success_fraction(), 0.0);
    }
}
