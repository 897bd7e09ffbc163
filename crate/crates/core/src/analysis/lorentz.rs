//! Lorentzian peak extraction: direct measurement plus weighted
//! Levenberg-Marquardt least squares.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formfactor::{trapezoid_weights, FormFactorCurve};

/// L(ω) = (κ/2π)·g²/((ω − ω₀)² + κ²/4).
pub fn lorentzian(omega: f64, omega0: f64, area: f64, fwhm: f64) -> f64 {
    let d = omega - omega0;
    fwhm / (2.0 * PI) * area / (d * d + 0.25 * fwhm * fwhm)
}

/// Model-free estimates read straight off the samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectMeasurement {
    /// Sample position of the maximum [rad/s].
    pub omega0: f64,
    pub peak: f64,
    /// Full width at half maximum by linear interpolation [rad/s].
    pub fwhm: f64,
    /// Trapezoid area over the window [rad²/s²].
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum FitQuality {
    Converged,
    /// Least squares failed; the reported parameters are the direct measurement.
    Degraded(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    pub omega0: f64,
    /// g² [rad²/s²].
    pub area: f64,
    /// κ [rad/s].
    pub fwhm: f64,
    /// sqrt(Σw(L − y)²/Σw y²) with trapezoid weights w.
    pub residual: f64,
    pub window: (f64, f64),
    pub direct: DirectMeasurement,
    pub quality: FitQuality,
    pub iterations: usize,
}

impl LorentzianFit {
    pub fn g(&self) -> f64 {
        self.area.sqrt()
    }

    pub fn is_converged(&self) -> bool {
        self.quality == FitQuality::Converged
    }
}

/// Damping schedule: start at 10⁻³, ×10 on a rejected step, ÷10 on an
/// accepted one, at most 500 iterations.
const LAMBDA_START: f64 = 1e-3;
const LAMBDA_UP: f64 = 10.0;
const LAMBDA_DOWN: f64 = 10.0;
const LAMBDA_MAX: f64 = 1e20;
const MAX_ITER: usize = 500;
/// Local maxima below this fraction of the window maximum are ignored.
pub const MAXIMA_THRESHOLD: f64 = 1e-2;

/// Fits the part of `curve` inside `window` (rad/s).
pub fn fit_lorentzian(curve: &FormFactorCurve, window: (f64, f64)) -> Result<LorentzianFit> {
    let (lo, hi) = window;
    let idx: Vec<usize> = (0..curve.omega.len()).filter(|&i| curve.omega[i] >= lo && curve.omega[i] <= hi).collect();
    let x: Vec<f64> = idx.iter().map(|&i| curve.omega[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| curve.values[i]).collect();
    fit_lorentzian_samples(&x, &y, window)
}

/// Fits samples `(x, y)`; `x` strictly increasing.
pub fn fit_lorentzian_samples(x: &[f64], y: &[f64], window: (f64, f64)) -> Result<LorentzianFit> {
    if x.len() != y.len() || x.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 samples in the window, got {}", x.len())));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Fit("abscissae must be strictly increasing".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite sample".into()));
    }
    let direct = direct_measurement(x, y)?;
    let w = trapezoid_weights(x);

    // Scaled problem: ξ = (ω − ω_pk)/s, η = y/peak.
    let s = direct.fwhm;
    let xi: Vec<f64> = x.iter().map(|&v| (v - direct.omega0) / s).collect();
    let eta: Vec<f64> = y.iter().map(|&v| v / direct.peak).collect();
    let ws: Vec<f64> = w.iter().map(|&v| v / s).collect();
    let start = [0.0, direct.area / (s * direct.peak), 1.0];
    let norm: f64 = ws.iter().zip(&eta).map(|(w, e)| w * e * e).sum();

    let outcome = levenberg_marquardt(&xi, &eta, &ws, start);
    let window_ok = |p: &[f64; 3]| {
        let om = direct.omega0 + s * p[0];
        om >= window.0 && om <= window.1
    };
    match outcome {
        Ok((p, iters, cost)) if p.iter().all(|v| v.is_finite()) && p[1] > 0.0 && p[2] > 0.0 && window_ok(&p) => {
            Ok(LorentzianFit {
                omega0: direct.omega0 + s * p[0],
                area: p[1] * s * direct.peak,
                fwhm: p[2] * s,
                residual: (cost / norm).sqrt(),
                window,
                direct,
                quality: FitQuality::Converged,
                iterations: iters,
            })
        }
        other => {
            let reason = match other {
                Err(e) => e,
                Ok((p, _, _)) => format!("fit left the admissible region: {p:?}"),
            };
            log::warn!("Lorentzian fit degraded: {reason}");
            let residual = weighted_misfit(x, y, &w, direct.omega0, direct.area, direct.fwhm);
            Ok(LorentzianFit {
                omega0: direct.omega0,
                area: direct.area,
                fwhm: direct.fwhm,
                residual,
                window,
                direct,
                quality: FitQuality::Degraded(reason),
                iterations: 0,
            })
        }
    }
}

fn weighted_misfit(x: &[f64], y: &[f64], w: &[f64], om: f64, area: f64, fwhm: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let r = lorentzian(x[i], om, area, fwhm) - y[i];
        num += w[i] * r * r;
        den += w[i] * y[i] * y[i];
    }
    (num / den).sqrt()
}

/// Maximum, interpolated FWHM and trapezoid area.
pub fn direct_measurement(x: &[f64], y: &[f64]) -> Result<DirectMeasurement> {
    let mut imax = 0;
    for i in 1..y.len() {
        if y[i] > y[imax] {
            imax = i;
        }
    }
    let peak = y[imax];
    if !(peak > 0.0) {
        return Err(Error::Fit("no positive maximum in the window".into()));
    }
    let maxima = (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= MAXIMA_THRESHOLD * peak)
        .count();
    if maxima > 1 {
        return Err(Error::Fit(format!("{maxima} local maxima in the window")));
    }
    let half = 0.5 * peak;
    let left = (0..imax).rev().find(|&i| y[i] < half);
    let right = (imax + 1..y.len()).find(|&i| y[i] < half);
    let (Some(l), Some(r)) = (left, right) else {
        return Err(Error::Fit("half maximum not reached inside the window".into()));
    };
    let cross = |a: usize, b: usize| x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
    let fwhm = cross(r - 1, r) - cross(l, l + 1);
    let w = trapezoid_weights(x);
    let area = w.iter().zip(y).map(|(w, y)| w * y).sum();
    Ok(DirectMeasurement { omega0: x[imax], peak, fwhm, area })
}

type Params = [f64; 3];

fn model_and_grad(xi: f64, p: &Params) -> (f64, [f64; 3]) {
    let [x0, a, k] = *p;
    let d = xi - x0;
    let den = d * d + 0.25 * k * k;
    let m = k * a / (2.0 * PI * den);
    let dx0 = m * 2.0 * d / den;
    let da = k / (2.0 * PI * den);
    let dk = a / (2.0 * PI * den) - m * 0.5 * k / den;
    (m, [dx0, da, dk])
}

fn cost(xi: &[f64], eta: &[f64], w: &[f64], p: &Params) -> f64 {
    xi.iter()
        .zip(eta)
        .zip(w)
        .map(|((&x, &e), &w)| {
            let r = model_and_grad(x, p).0 - e;
            w * r * r
        })
        .sum()
}

fn levenberg_marquardt(
    xi: &[f64],
    eta: &[f64],
    w: &[f64],
    start: Params,
) -> std::result::Result<(Params, usize, f64), String> {
    let mut p = start;
    let mut c = cost(xi, eta, w, &p);
    let mut lambda = LAMBDA_START;
    for iter in 1..=MAX_ITER {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for i in 0..xi.len() {
            let (m, g) = model_and_grad(xi[i], &p);
            let r = m - eta[i];
            for a in 0..3 {
                jtr[a] += w[i] * g[a] * r;
                for b in 0..3 {
                    jtj[a][b] += w[i] * g[a] * g[b];
                }
            }
        }
        loop {
            let mut lhs = jtj;
            for a in 0..3 {
                lhs[a][a] *= 1.0 + lambda;
            }
            let rhs = [-jtr[0], -jtr[1], -jtr[2]];
            let Some(step) = solve3(lhs, rhs) else {
                lambda *= LAMBDA_UP;
                if lambda > LAMBDA_MAX {
                    return Err("singular normal equations".into());
                }
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let ct = if trial[1] > 0.0 && trial[2] > 0.0 { cost(xi, eta, w, &trial) } else { f64::INFINITY };
            if ct.is_finite() && ct <= c {
                let small = (0..3).all(|a| step[a].abs() <= 1e-13 * p[a].abs().max(1e-3));
                let flat = c - ct <= 1e-16 * c;
                p = trial;
                c = ct;
                lambda = (lambda / LAMBDA_DOWN).max(1e-12);
                if small || (flat && c == 0.0) || c <= 1e-300 {
                    return Ok((p, iter, c));
                }
                break;
            }
            lambda *= LAMBDA_UP;
            if lambda > LAMBDA_MAX {
                // No descent direction left: converged to machine precision.
                return Ok((p, iter, c));
            }
        }
    }
    Err(format!("no convergence after {MAX_ITER} iterations"))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
