use proptest::prelude::*;
use twosource_core::measurements::{
    bhattacharyya, bspade_error, bspade_exponent, direct_imaging_bounds, direct_imaging_exponent, sliver_error,
    sliver_exponent,
};
use twosource_core::quantum::{min_error_unconditional, quantum_chernoff, Conditioning, Scenario};
use twosource_core::{min_error_conditional, OverlapStats, PointSpreadFunction, Priors};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalues_sum_to_one(d in 0.0f64..20.0) {
        let s = OverlapStats::gaussian(d).unwrap();
        prop_assert_eq!(s.lambda_plus + s.lambda_minus, 1.0);
        prop_assert!(s.delta.abs() <= 1.0);
        prop_assert!(s.lambda_plus >= s.chi * s.chi);
    }

    #[test]
    fn min_error_ordering(d in 0.0f64..8.0, p1 in 0.05f64..0.95, l in 0u64..60) {
        let s = OverlapStats::gaussian(d).unwrap();
        let pr = Priors::from_p1(p1).unwrap();
        let q = min_error_conditional(&s, pr, l).p_error;
        let b = bspade_error(&s, pr, Conditioning::Photons(l)).unwrap().p_error;
        let v = sliver_error(&s, pr, Conditioning::Photons(l)).unwrap().p_error;
        prop_assert!((0.0..=pr.min() + 1e-15).contains(&q));
        prop_assert!(q <= b + 1e-14, "quantum {} > bspade {}", q, b);
        // the simplified SLIVER rule is only competitive for p1 >= p2
        if p1 >= 0.5 {
            prop_assert!(b <= v + 1e-14);
        }
    }

    #[test]
    fn min_error_decreases_with_photons(d in 0.0f64..6.0, p1 in 0.05f64..0.95, l in 0u64..100) {
        let s = OverlapStats::gaussian(d).unwrap();
        let pr = Priors::from_p1(p1).unwrap();
        let a = min_error_conditional(&s, pr, l).p_error;
        let b = min_error_conditional(&s, pr, l + 1).p_error;
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn min_error_decreases_with_separation(d in 0.0f64..6.0, dd in 0.0f64..1.0, l in 1u64..40) {
        let a = min_error_conditional(&OverlapStats::gaussian(d).unwrap(), Priors::equal(), l).p_error;
        let b = min_error_conditional(&OverlapStats::gaussian(d + dd).unwrap(), Priors::equal(), l).p_error;
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn direct_bounds_are_ordered(d in 0.0f64..6.0, l in 1u64..50) {
        let g = PointSpreadFunction::gaussian();
        let f = bhattacharyya(&g, d).unwrap();
        let xi = direct_imaging_exponent(&g, d).unwrap().exponent;
        let b = direct_imaging_bounds(f, xi, l, Priors::equal()).unwrap();
        prop_assert!(b.lower <= b.upper + 1e-15);
        // no measurement beats the quantum limit
        let q = min_error_conditional(&OverlapStats::gaussian(d).unwrap(), Priors::equal(), l).p_error;
        prop_assert!(q <= b.upper + 1e-15);
    }
}

#[test]
fn exponent_ordering_on_grid() {
    let g = PointSpreadFunction::gaussian();
    for i in 0..=100 {
        let d = i as f64 * 0.1;
        let s = OverlapStats::gaussian(d).unwrap();
        let q = quantum_chernoff(&s).unwrap().exponent;
        let b = bspade_exponent(&s).unwrap().exponent;
        let v = sliver_exponent(&s).unwrap().exponent;
        let x = direct_imaging_exponent(&g, d).unwrap().exponent;
        assert_eq!(q, b);
        if d == 0.0 {
            assert_eq!(v, b);
        } else {
            assert!(v < b, "d={d}");
        }
        assert!(x <= b + 1e-9, "d={d}");
    }
}

#[test]
fn sliver_taylor_remainder() {
    for i in 0..=30 {
        let d = i as f64 * 0.01;
        let v = sliver_exponent(&OverlapStats::gaussian(d).unwrap()).unwrap().exponent;
        assert!((v - (d * d / 16.0 - d.powi(4) / 512.0)).abs() <= 1e-6);
    }
}

#[test]
fn unconditional_monotone_in_modes() {
    let s = OverlapStats::gaussian(2.0).unwrap();
    let mut prev = 0.5;
    for m in [1u64, 10, 100, 500, 1000, 5000] {
        let sc = Scenario::new(2.0, Priors::equal(), 0.01, m).unwrap();
        let q = min_error_unconditional(&s, &sc).unwrap().p_error;
        let b = bspade_error(&s, Priors::equal(), sc.conditioning()).unwrap().p_error;
        assert!(q < prev && q <= b, "M={m}");
        prev = q;
    }
}

#[test]
fn decay_slope_approaches_chernoff_exponent() {
    let s = OverlapStats::gaussian(2.0).unwrap();
    let lp = |l| min_error_conditional(&s, Priors::equal(), l).p_error.ln();
    let slope = (lp(200) - lp(400)) / 200.0;
    let xi = quantum_chernoff(&s).unwrap().exponent;
    assert!((slope - xi).abs() < 0.02 * xi, "{slope} vs {xi}");
}
