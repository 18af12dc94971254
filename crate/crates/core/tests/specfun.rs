use fracns::specfun::{
    mainardi, mittag_leffler, ml_via_mainardi_quadrature, LaplaceMode, MlBranch, MlQuery,
};
use proptest::prelude::*;

// 40-digit series sums.
const REFERENCE: [(f64, f64, f64, f64); 8] = [
    (0.5, 0.5, -2.5, 0.037_173_673_394_897_335),
    (0.5, 1.0, -2.5, 0.210_806_364_061_143_58),
    (0.6, 1.8, -4.0, 0.231_453_588_727_898_73),
    (0.6, 0.6, -4.0, 0.018_264_707_855_107_769),
    (0.6, 1.2, -4.0, 0.163_310_066_146_741_39),
    (0.9, 0.9, -10.0, 0.001_434_652_362_294_128_6),
    (0.3, 1.0, -20.0, 0.037_406_226_213_884_453),
    (0.7, 1.0, -50.0, 0.006_793_665_670_383_093_9),
];

#[test]
fn frozen_reference_values() {
    for (a, b, x, expected) in REFERENCE {
        let v = mittag_leffler(a, b, x).unwrap();
        assert!((v - expected).abs() <= 1e-13 + 1e-12 * expected, "E_{a},{b}({x}) = {v}, expected {expected}");
    }
}

#[test]
fn nearly_singular_contour_endpoint() {
    // (b - 1)/a close to 1
    let (a, b, x) = (0.569_295_692_666_621_1, 1.564_152_091_965_865, -6.771_827_904_859_3);
    let v = mittag_leffler(a, b, x).unwrap();
    assert!((v - 0.136_463_524_532_652_41).abs() < 1e-13);
    let v = mittag_leffler(a, a + b, x).unwrap();
    assert!((v - 0.145_773_612_496_390_12).abs() < 1e-13);
}

#[test]
fn exponential_case() {
    for x in [-3.0, -0.5, 0.0, 0.7, 2.0] {
        assert!((mittag_leffler(1.0, 1.0, x).unwrap() - f64::exp(x)).abs() < 1e-13 * f64::exp(x).max(1.0));
    }
}

#[test]
fn branches_are_reported() {
    let v = MlQuery::new(0.5, 1.0, -0.3).unwrap().evaluate().unwrap();
    assert!(matches!(v.branch, MlBranch::Series { .. }));
    let v = MlQuery::new(0.3, 1.0, -40.0).unwrap().evaluate().unwrap();
    assert!(matches!(v.branch, MlBranch::Asymptotic { .. }));
}

#[test]
fn invalid_orders_are_rejected() {
    assert!(mittag_leffler(0.0, 1.0, -1.0).is_err());
    assert!(mittag_leffler(-0.5, 1.0, -1.0).is_err());
    assert!(mittag_leffler(0.5, 1.0, f64::NAN).is_err());
    assert!(mainardi(0.5, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relaxation_is_completely_monotone(a in 0.2f64..1.0, x in 0.0f64..30.0, dx in 0.01f64..5.0) {
        let e1 = mittag_leffler(a, 1.0, -x).unwrap();
        let e2 = mittag_leffler(a, 1.0, -x - dx).unwrap();
        prop_assert!(e1 > 0.0 && e1 <= 1.0);
        prop_assert!(e2 <= e1 + 1e-15);
    }

    #[test]
    fn shift_recurrence(a in 0.2f64..1.0, b in 0.5f64..2.0, x in -10.0f64..0.0) {
        // E_{a,b}(x) = 1/Γ(b) + x E_{a,a+b}(x)
        let lhs = mittag_leffler(a, b, x).unwrap();
        let rhs = 1.0 / libm::tgamma(b) + x * mittag_leffler(a, a + b, x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn mainardi_is_a_density(eta in 0.1f64..0.95, s in 0.0f64..20.0) {
        prop_assert!(mainardi(eta, s).unwrap() >= 0.0);
    }

    #[test]
    fn laplace_oracle_agrees(a in 0.25f64..0.95, x in 0.01f64..20.0) {
        let v = mittag_leffler(a, a, -x).unwrap();
        let o = ml_via_mainardi_quadrature(a, x, LaplaceMode::Second).unwrap();
        prop_assert!((v - o).abs() < 1e-8);
    }
}
