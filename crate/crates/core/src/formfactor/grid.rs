//! Peak-adaptive frequency grids in reduced units u = ω/ω_c.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    /// Peak centres, each wrapped in a dense cluster.
    pub centers: Vec<f64>,
    /// Points per cluster.
    pub cluster_points: usize,
    /// Cluster half-span in units of the pole half-width δ.
    pub cluster_span: f64,
    /// Log-spaced points on each side between a cluster edge and the
    /// neighbouring cluster or grid edge.
    pub tail_points: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, centers: Vec<f64>) -> Self {
        Self { lo, hi, centers, cluster_points: 2001, cluster_span: 1e4, tail_points: 400 }
    }
}

/// Builds the grid: around every centre, `cluster_points` points
/// t = δ·sinh(x) with x uniform and |t| ≤ span·δ; beyond each cluster,
/// geometrically spaced points out to halfway to the next centre or to the
/// grid edge.
pub fn peak_adaptive_grid(spec: &GridSpec, delta: f64) -> Result<Vec<f64>> {
    if !(spec.lo < spec.hi) || !spec.lo.is_finite() || !spec.hi.is_finite() {
        return Err(Error::param("grid", format!("empty range [{}, {}]", spec.lo, spec.hi)));
    }
    if !(delta > 0.0) || spec.cluster_points < 3 {
        return Err(Error::param("grid", "degenerate cluster"));
    }
    let mut centers: Vec<f64> = spec.centers.iter().copied().filter(|c| *c >= spec.lo && *c <= spec.hi).collect();
    centers.sort_by(f64::total_cmp);
    centers.dedup();
    let mut pts = vec![spec.lo, spec.hi];
    let half = spec.cluster_span * delta;
    let xmax = spec.cluster_span.asinh();
    let m = spec.cluster_points - 1;
    for (i, &c) in centers.iter().enumerate() {
        for j in 0..=m {
            let x = -xmax + 2.0 * xmax * j as f64 / m as f64;
            pts.push(c + delta * x.sinh());
        }
        let left = if i == 0 { spec.lo } else { 0.5 * (centers[i - 1] + c) };
        let right = if i + 1 == centers.len() { spec.hi } else { 0.5 * (c + centers[i + 1]) };
        for (edge, sign) in [(left, -1.0), (right, 1.0)] {
            let reach = (edge - c).abs();
            if reach <= half {
                continue;
            }
            let ratio = reach / half;
            for j in 1..spec.tail_points {
                let d = half * ratio.powf(j as f64 / spec.tail_points as f64);
                pts.push(c + sign * d);
            }
            pts.push(edge);
        }
    }
    if centers.is_empty() {
        let n = spec.tail_points.max(2) * 2;
        for j in 0..=n {
            pts.push(spec.lo + (spec.hi - spec.lo) * j as f64 / n as f64);
        }
    }
    pts.retain(|x| *x >= spec.lo && *x <= spec.hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1.0));
    // Dedup may have kept a neighbour in place of an endpoint.
    if let Some(last) = pts.last_mut() {
        *last = spec.hi;
    }
    pts[0] = spec.lo;
    Ok(pts)
}

/// Trapezoid weights of a strictly increasing grid.
pub fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (x[i + 1] - x[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strictly_increasing_and_dense() {
        let delta = 1e-6 / (4.0 * std::f64::consts::PI);
        let g = peak_adaptive_grid(&GridSpec::new(0.5, 6.0, vec![1.0, 3.0, 5.0]), delta).unwrap();
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g[0], 0.5);
        assert_eq!(*g.last().unwrap(), 6.0);
        for c in [1.0, 3.0, 5.0] {
            let near = g.iter().filter(|&&x| (x - c).abs() <= delta).count();
            assert!(near > 50, "{near} points within δ of {c}");
            assert!(g.iter().any(|&x| x == c));
        }
    }

    #[test]
    fn endpoints_exact_when_tail_lands_on_edge() {
        let delta = 1e-6 / (4.0 * std::f64::consts::PI);
        let (lo, span, c) = (0.40240294830031326, 3.1370850928192167, 0.37983550884894224);
        let spec = GridSpec { cluster_points: 5, tail_points: 2, ..GridSpec::new(lo, lo + span, vec![lo + c * span]) };
        let g = peak_adaptive_grid(&spec, delta).unwrap();
        assert_eq!(g[0], lo);
        assert_eq!(*g.last().unwrap(), lo + span);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn empty_range_rejected() {
        assert!(peak_adaptive_grid(&GridSpec::new(2.0, 2.0, vec![]), 1e-7).is_err());
    }

    #[test]
    fn weights_sum_to_length() {
        let x = [0.0, 0.1, 0.5, 2.0];
        let s: f64 = trapezoid_weights(&x).iter().sum();
        assert!((s - 2.0).abs() < 1e-15);
    }
}
