use std::f64::consts::PI;

use planarcav::analysis::*;
use planarcav::{LateralProfile, PhysicalSetup};

const MHZ: f64 = 2.0 * PI * 1e6;

fn optimal(n: u32) -> CqedTriplet {
    let s = PhysicalSetup::cesium_d2(n).unwrap();
    extract_triplet(&s, &LateralProfile::optimal(&s, s.omega_a(), n).unwrap(), n).unwrap()
}

#[test]
fn optimal_n3_triplet() {
    let t = optimal(3);
    assert!((t.g / MHZ / 21.0 - 1.0).abs() < 0.15);
    assert!((t.kappa / MHZ / 38.0 - 1.0).abs() < 0.15);
    assert!(t.gamma_below_floor);
    assert!(t.fit.is_converged());
    assert!(t.fit.omega0 >= t.fit.window.0 && t.fit.omega0 <= t.fit.window.1);
}

#[test]
fn hg_residual_drops_with_waist() {
    let s = PhysicalSetup::cesium_d2(1).unwrap();
    let narrow = extract_triplet(&s, &LateralProfile::hermite_gauss(100e-6).unwrap(), 1).unwrap();
    let wide = extract_triplet(&s, &LateralProfile::hermite_gauss(500e-6).unwrap(), 1).unwrap();
    assert!(narrow.fit.residual > wide.fit.residual);
    assert!(narrow.kappa > wide.kappa);
    assert_eq!(wide.gamma_eval_freq, 0.99 * s.omega_a());
}

#[test]
fn area_and_fit_agree_for_optimal_curves() {
    for n in [3u32, 5, 9, 15] {
        let t = optimal(n);
        let gi = t.g_integral.unwrap();
        assert!((gi / t.g - 1.0).abs() < 0.05, "N={n}: {gi} vs {}", t.g);
    }
}

#[test]
fn direct_and_fitted_width_agree_for_clean_peaks() {
    let s = PhysicalSetup::cesium_d2(1).unwrap();
    let mut checked = 0;
    for w in [1600e-6, 3200e-6] {
        let t = extract_triplet(&s, &LateralProfile::hermite_gauss(w).unwrap(), 1).unwrap();
        if t.fit.residual < 1e-2 {
            assert!((t.fit.direct.fwhm / t.kappa - 1.0).abs() < 0.05);
            checked += 1;
        }
    }
    let t = optimal(21);
    if t.fit.residual < 1e-2 {
        assert!((t.fit.direct.fwhm / t.kappa - 1.0).abs() < 0.05);
        checked += 1;
    }
    assert!(checked >= 2);
}

#[test]
fn triplet_is_deterministic_across_pools() {
    let s = PhysicalSetup::cesium_d2(5).unwrap();
    let p = LateralProfile::hermite_gauss(500e-6).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            extract_triplet_at(&s, &p, 5, 3.0, s.angular(3.99), &TripletOptions::default()).unwrap()
        })
    };
    let a = run(1);
    for threads in [1, 3, 8] {
        let b = run(threads);
        assert_eq!(a.triplet.g.to_bits(), b.triplet.g.to_bits());
        assert_eq!(a.triplet.kappa.to_bits(), b.triplet.kappa.to_bits());
        assert_eq!(a.triplet.gamma.to_bits(), b.triplet.gamma.to_bits());
        assert_eq!(a.curve, b.curve);
    }
}

#[test]
fn sweep_n_short() {
    let base = PhysicalSetup::cesium_d2(1).unwrap();
    let r = sweep_n(&base, &[1, 3, 5, 7], &TripletOptions::default()).unwrap();
    assert_eq!(r.succeeded(), 4);
    let vals: Vec<f64> = r.rows.iter().map(|r| r.value).collect();
    assert_eq!(vals, vec![1.0, 3.0, 5.0, 7.0]);
    let t: Vec<&CqedTriplet> = r.rows.iter().map(|r| r.triplet.as_ref().unwrap()).collect();
    assert!(t.windows(2).all(|w| w[1].g < w[0].g && w[1].kappa < w[0].kappa));
    assert_eq!(r.crossing, None);
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert!(csv.starts_with("sweep_value,g_rad_s,kappa_rad_s,gamma_rad_s,residual\n"));
    assert_eq!(csv.lines().count(), 5);
    let back: SweepResult = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn sweep_w_keeps_going_and_orders_rows() {
    let s = PhysicalSetup::cesium_d2(1).unwrap();
    let r = sweep_w(&s, &[200e-6, 400e-6, 800e-6], &TripletOptions::default()).unwrap();
    assert_eq!(r.succeeded(), 3);
    assert_eq!(r.n_wavelengths, Some(1));
    assert!(r.rows.windows(2).all(|w| w[1].value > w[0].value));
}

#[test]
fn rejects_bad_targets() {
    let s = PhysicalSetup::cesium_d2(1).unwrap();
    let p = LateralProfile::hermite_gauss(500e-6).unwrap();
    let o = TripletOptions::default();
    assert!(extract_triplet_at(&s, &p, 1, -1.0, s.omega_a(), &o).is_err());
    assert!(extract_triplet_at(&s, &p, 1, 1.0, 0.0, &o).is_err());
    assert!(extract_triplet_at(&s, &p, 1, 1.0, s.omega_a(), &TripletOptions { window_halfwidth: 0.0, ..o }).is_err());
}
