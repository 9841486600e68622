use hmf_core::analysis::{
    counting_spectrum, default_h_grid, global_exponent, pointwise_exponent, ExponentMode, LeaderMode, DEFAULT_WINDOW,
};
use hmf_core::lattice::index::parity_scan_irreducible;
use hmf_core::lattice::{approx_rate, count_irreducible, count_l0, point_with_rate};
use hmf_core::synthesis::{
    besov_saturating_field, besov_seq_norm, monofractal_round, parse_field, sandwich_check_classes, write_field, BesovParams,
};
use hmf_core::{ExecPolicy, GPoint};
use proptest::prelude::*;

fn f22() -> (hmf_core::synthesis::CoefficientField, BesovParams) {
    let p = BesovParams::new(2.0, 2.0, 2.0).unwrap();
    (besov_saturating_field(p), p)
}

#[test]
fn telescoping_counts() {
    for j in 0..=8 {
        let s: u128 = (0..=j).map(|big| count_irreducible(big).unwrap()).sum();
        assert_eq!(s, count_l0(j).unwrap());
    }
    for big in 1..=3 {
        assert_eq!(parity_scan_irreducible(big, ExecPolicy::Parallel) as u128, count_irreducible(big).unwrap());
    }
}

#[test]
fn analysis_survives_file_round_trip() {
    let (f, p) = f22();
    let back = parse_field(&write_field(&f, Some(&p))).unwrap();
    assert_eq!(back.params, Some(p));
    let x = point_with_rate(2.0, 30).unwrap();
    let mode = ExponentMode::Fit { beta: p.beta() };
    let a = pointwise_exponent(&f, &x, DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap();
    let b = pointwise_exponent(&back.field, &x, DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap();
    assert_eq!(a, b);
    assert_eq!(besov_seq_norm(&f, &p).unwrap(), besov_seq_norm(&back.field, &p).unwrap());
}

#[test]
fn exponent_follows_approximation_rate() {
    let (f, p) = f22();
    let mode = ExponentMode::Fit { beta: p.beta() };
    for xi in [f64::INFINITY, 2.0, 1.0] {
        let x = point_with_rate(xi, 30).unwrap();
        let h = pointwise_exponent(&f, &x, DEFAULT_WINDOW, mode, LeaderMode::Exact).unwrap().value;
        let expect = p.critical() + 4.0 / (p.p * xi);
        assert!((h - expect).abs() <= 0.15, "xi={xi}: {h} vs {expect}");
    }
}

#[test]
fn constructed_point_has_its_rate() {
    let x = point_with_rate(2.0, 30).unwrap();
    let scales: Vec<i64> = (8..=24).collect();
    let r = approx_rate(&x, &scales, 2).unwrap();
    assert!((r.xi_hat - 2.0).abs() <= 0.2, "{}", r.xi_hat);
}

#[test]
fn rounding_pipeline() {
    let base = besov_saturating_field(BesovParams::new(3.0, 2.0, 2.0).unwrap());
    let r = monofractal_round(&base, 1.0, 3).unwrap();
    assert!(sandwich_check_classes(&base, &r, 1.0, 3).unwrap().holds());
    let g = global_exponent(&r, DEFAULT_WINDOW, ExponentMode::Fit { beta: 0.0 }).unwrap();
    assert!((g.value - 1.0).abs() <= 0.05, "{}", g.value);
    let back = parse_field(&write_field(&r, None)).unwrap().field;
    assert_eq!(back, r);
}

#[test]
fn spectrum_policy_and_thread_independent() {
    let (f, p) = f22();
    let grid = default_h_grid(&p, 8);
    let a = counting_spectrum(&f, &p, (1, 14), &grid, 1.0, p.beta()).unwrap();
    let b = hmf_core::par::with_threads(1, || counting_spectrum(&f, &p, (1, 14), &grid, 1.0, p.beta()).unwrap());
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pointwise_at_least_global(p in 0.0f64..1.0, q in 0.0f64..1.0, r in 0.0f64..1.0) {
        // leaders never exceed the per-scale supremum
        let (f, params) = f22();
        let mode = ExponentMode::Raw;
        let x = GPoint::new(p, q, r);
        let e = pointwise_exponent(&f, &x, (4, 12), mode, LeaderMode::Exact).unwrap();
        let g = global_exponent(&f, (4, 12), mode).unwrap();
        for (a, b) in e.samples.iter().zip(&g.samples) {
            prop_assert!(a.1 <= b.1 + 1e-12);
        }
        prop_assert!(e.value >= params.critical() - 1e-9);
    }
}
