//! Cross-module checks against independent brute-force oracles.

use std::f64::consts::PI;

use horn_spectra::core_geometry::log_spaced;
use horn_spectra::{
    bracket, core_stats, donnelly_core_stats, lower_count, n_of_e, upper_count, validate_domain,
    weyl_decomposition, DomainSpec, PerimeterConvention, SimpleDomainF32, SimpleDomainF64,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn example_box(k: usize) -> (f64, f64) {
    let k = k as f64;
    (k * k * k, 1.0 / (k * k))
}

fn example_a(k: usize) -> f64 {
    (1..k).map(|j| example_box(j).0).sum()
}

/// Distance from an interior point to the boundary of the example staircase,
/// scanning every boundary segment of the first `horizon` boxes.
fn boundary_distance(x: f64, y: f64, horizon: usize) -> f64 {
    let seg = |x0: f64, x1: f64, y0: f64, y1: f64| {
        let dx = (x0 - x).max(x - x1).max(0.0);
        let dy = (y0 - y).max(y - y1).max(0.0);
        dx.hypot(dy)
    };
    let mut d = y.min(seg(0.0, 0.0, 0.0, 1.0));
    for k in 1..=horizon {
        let (a0, a1) = (example_a(k), example_a(k + 1));
        let (_, b) = example_box(k);
        let (_, b_next) = example_box(k + 1);
        d = d.min(seg(a0, a1, b, b)).min(seg(a1, a1, b_next, b));
    }
    d
}

#[test]
fn erosion_volume_matches_monte_carlo() {
    let d = SimpleDomainF64::example();
    let e = 1e4;
    let est = donnelly_core_stats(&d, e, 512).unwrap();
    let eps = PI / e.sqrt();

    // Stratified by box; only boxes taller than 2ε can hold eroded points.
    let mut rng = StdRng::seed_from_u64(17);
    let samples = 200_000;
    let (mut mean, mut var) = (0.0, 0.0);
    let mut k = 1;
    while example_box(k).1 > 2.0 * eps {
        let (w, h) = example_box(k);
        let a = example_a(k);
        let hits = (0..samples)
            .filter(|_| {
                let x = a + w * rng.gen::<f64>();
                let y = h * rng.gen::<f64>();
                boundary_distance(x, y, k + 3) >= eps
            })
            .count();
        let p = hits as f64 / samples as f64;
        mean += w * h * p;
        var += (w * h).powi(2) * p * (1.0 - p) / samples as f64;
        k += 1;
    }
    let tol = 5.0 * var.sqrt() + est.volume_error;
    assert!(
        (est.volume_estimate - mean).abs() <= tol,
        "estimate {} vs Monte Carlo {mean} ± {tol}",
        est.volume_estimate
    );
}

#[test]
fn bracket_matches_enumeration_at_ten_thousand() {
    let d = SimpleDomainF64::example();
    let e = 1e4_f64;
    let (mut lower, mut upper) = (0u64, 0u64);
    for k in 1.. {
        let (w, h) = example_box(k);
        if PI * PI / (h * h) > e {
            break;
        }
        let (lmax, mmax) = (
            (w * e.sqrt() / PI) as u64 + 1,
            (h * e.sqrt() / PI) as u64 + 1,
        );
        for l in 0..=lmax {
            for m in 1..=mmax {
                let lam = PI * PI * ((l * l) as f64 / (w * w) + (m * m) as f64 / (h * h));
                if lam <= e {
                    upper += 1;
                    lower += u64::from(l > 0);
                }
            }
        }
    }
    let r = bracket(&d, e).unwrap();
    assert_eq!((r.lower, r.upper), (lower, upper));
    assert_eq!(r.gap, upper - lower);
    assert_eq!(r.certificate_holds(), Some(true));
}

#[test]
fn lower_count_is_at_least_linear() {
    let d = SimpleDomainF64::example();
    let ratios: Vec<f64> = log_spaced(1e3, 1e8, 30)
        .into_iter()
        .map(|e| lower_count(&d, e).unwrap() as f64 / e)
        .collect();
    // The lattice count oscillates, so only a floor is asserted.
    assert!(ratios[0] > 0.0);
    assert!(ratios.iter().all(|&r| r >= ratios[0]), "{ratios:?}");
}

#[test]
fn harmonic_preset_is_flagged() {
    let d = SimpleDomainF64::harmonic();
    let report = validate_domain(&d, 1000).unwrap();
    assert!(!report.check("b_summable").unwrap().passed);
    let w = weyl_decomposition(&d, 1e4, PerimeterConvention::SumOfRectangles).unwrap();
    assert!(w.advisory);
    assert!(w.residual.abs() <= 1e-6 * w.lower as f64);
}

#[test]
fn json_round_trip_preserves_counts() {
    let d = SimpleDomainF64::example();
    let text = serde_json::to_string(&DomainSpec::of(&d)).unwrap();
    let back = SimpleDomainF64::from_json(&text).unwrap();
    for e in [1e2, 1e4, 1e6] {
        assert_eq!(bracket(&d, e).unwrap(), bracket(&back, e).unwrap());
    }
}

#[test]
fn single_precision_instantiation() {
    let d = SimpleDomainF32::example();
    for e in [1e2_f32, 1e3, 1e4] {
        let r = bracket(&d, e).unwrap();
        assert!(r.lower <= r.upper);
        let n = n_of_e(&d, e).unwrap();
        let c = core_stats(&d, e).unwrap();
        assert_eq!(c.n, n);
        let wide = upper_count(&SimpleDomainF64::example(), f64::from(e)).unwrap();
        assert!((r.upper as f64 - wide as f64).abs() <= 0.01 * wide as f64 + 2.0);
    }
}
