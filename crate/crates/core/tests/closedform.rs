use proptest::prelude::*;
use realeig::closedform::*;
use realeig::density::{expected_count_quadrature, QuadratureConfig};
use realeig::series::expected_count_genfun;

mod common;
use common::{rel, EXPECTED_COUNTS, RATIOS};

fn shape(n: u32, d: u32) -> ProblemShape {
    ProblemShape::new(n, d).unwrap()
}

#[test]
fn reference_values_every_route() {
    for &(n, d, want) in EXPECTED_COUNTS {
        let s = shape(n, d);
        let sum = expected_count_sum(s).unwrap().value;
        assert!(rel(sum, want) < 1e-12, "sum {s}: {sum} vs {want}");
        let hyp = expected_count_hypergeom(s).unwrap().value;
        assert!(rel(hyp, want) < 1e-12, "hypergeom {s}: {hyp} vs {want}");
        let gf = expected_count_genfun(s).unwrap().value;
        assert!(rel(gf, want) < 1e-9, "genfun {s}: {gf} vs {want}");
        if n <= 20 {
            let q = expected_count_quadrature(s, QuadratureConfig::default())
                .unwrap()
                .value;
            assert!(rel(q, want) < 1e-8, "quadrature {s}: {q} vs {want}");
        }
    }
}

#[test]
fn three_three_is_three_point_six() {
    // the often-quoted 3.56 is off; every route gives 3.598…
    let v = expected_count_sum(shape(3, 3)).unwrap().value;
    assert!((v - 3.56).abs() > 0.03);
    assert!((v - 3.598_076_211_353_316).abs() < 1e-13);
}

#[test]
fn dnd_values() {
    assert_eq!(dnd(shape(3, 3)).unwrap(), 13);
    assert_eq!(dnd(shape(17, 1)).unwrap(), 17);
    assert_eq!(dnd(shape(2, 5)).unwrap(), 6);
    assert!(dnd(shape(80, 3)).is_err());
    assert_eq!(
        dnd_big(shape(80, 3)).to_string(),
        "73904414707172961658041605103191648800"
    );
}

#[test]
fn one_dimensional_count_is_one() {
    for d in 1..=20 {
        let s = shape(1, d);
        assert_eq!(expected_count_hypergeom(s).unwrap().value, 1.0);
        assert_eq!(expected_count_sum(s).unwrap().value, 1.0);
    }
}

#[test]
fn hypergeometric_and_sum_agree_to_fifty() {
    let mut worst: f64 = 0.0;
    for n in 2..=50 {
        for d in 1..=50 {
            let s = shape(n, d);
            let a = expected_count_hypergeom(s).unwrap().value;
            let b = expected_count_sum(s).unwrap().value;
            worst = worst.max(rel(a, b));
        }
    }
    assert!(worst < 1e-9, "worst {worst:e}");
}

#[test]
fn ratio_reference_values() {
    for &(n, d, want) in RATIOS {
        let r = normalized_ratio(shape(n, d)).unwrap();
        assert!((r - want).abs() < 1e-11, "({n},{d}): {r} vs {want}");
    }
    assert!((normalized_ratio(shape(2, 3)).unwrap() - 1.0).abs() < 1e-14);
    assert!((normalized_ratio(shape(40, 2)).unwrap() - 1.0).abs() < 0.05);
}

#[test]
fn matrix_ratio_approaches_its_limit_slowly() {
    let limit = ratio_limit_large_n(1);
    assert!((limit - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
    // at n = 40 the gap is still 0.07; the ratio only gets within 0.02 near n = 2000
    let gap = |n| normalized_ratio(shape(n, 1)).unwrap() - limit;
    assert!((gap(40) - 0.071_565_419).abs() < 1e-8);
    assert!(gap(200) > 0.02);
    assert!(gap(2000) > 0.0 && gap(2000) < 0.02);
}

#[test]
fn ratio_trends() {
    let floor = 1e-12;
    for d in [1, 2, 3, 5] {
        let limit = ratio_limit_large_n(d);
        let gaps: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| (normalized_ratio(shape(n, d)).unwrap() - limit).abs())
            .collect();
        assert!(
            gaps.windows(2).all(|w| w[1] <= w[0] + floor),
            "d={d}: {gaps:?}"
        );
    }
    for n in [2, 3, 4, 5] {
        let gaps: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&d| (normalized_ratio(shape(n, d)).unwrap() - 1.0).abs())
            .collect();
        assert!(
            gaps.windows(2).all(|w| w[1] <= w[0] + floor),
            "n={n}: {gaps:?}"
        );
    }
}

#[test]
fn z_count_relation() {
    assert_eq!(z_count_from_class_count(4, 3, false).unwrap(), 4);
    assert_eq!(z_count_from_class_count(3, 2, false).unwrap(), 6);
    assert_eq!(z_count_from_class_count(3, 2, true).unwrap(), 5);
    assert!(z_count_from_class_count(0, 2, true).is_err());
}

proptest! {
    #[test]
    fn bounded_by_complex_count(n in 1u32..=40, d in 1u32..=12) {
        let s = shape(n, d);
        let e = expected_count_sum(s).unwrap().value;
        prop_assert!(e >= 1.0);
        prop_assert!(e <= dnd_big(s).to_string().parse::<f64>().unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn routes_agree_on_small_shapes(n in 2u32..=12, d in 1u32..=8) {
        let s = shape(n, d);
        let a = expected_count_hypergeom(s).unwrap().value;
        let b = expected_count_sum(s).unwrap().value;
        prop_assert!(rel(a, b) < 1e-9);
    }

    #[test]
    fn log_form_matches(n in 1u32..=60, d in 1u32..=60) {
        let s = shape(n, d);
        let v = expected_count_sum(s).unwrap().value;
        prop_assert!((ln_expected_count_sum(s).unwrap() - v.ln()).abs() < 1e-12 * v.ln().abs().max(1.0));
    }
}
