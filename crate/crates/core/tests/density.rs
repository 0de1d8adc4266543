use std::f64::consts::PI;

use proptest::prelude::*;
use realeig::closedform::ProblemShape;
use realeig::density::*;
use realeig::specfun::gamma;

mod common;
use common::{rel, ABS_DET};

#[test]
fn abs_det_reference_values() {
    for &(n, t, want) in ABS_DET {
        let v = expected_abs_det(n, t).unwrap();
        assert!(rel(v, want) < 1e-12, "({n}, {t}): {v} vs {want}");
        assert!((ln_expected_abs_det(n, t).unwrap() - want.ln()).abs() < 1e-12);
    }
    assert!(rel(expected_abs_det(1, 0.0).unwrap(), (2.0 / PI).sqrt()) < 1e-15);
    assert!(j_density(1, 3, 0.0).is_err());
}

#[test]
fn kernel_matches_determinant_moment() {
    let mut worst: f64 = 0.0;
    for n in 1..=10u32 {
        let nf = n as f64;
        for d in 1..=6u32 {
            let df = d as f64;
            for l in [0.0, 0.5, 1.0, 2.0, 5.0] {
                let rhs = df.sqrt().powi(n as i32) * PI.sqrt()
                    / (2f64.sqrt().powi(n as i32) * gamma((nf + 1.0) / 2.0))
                    * expected_abs_det(n, l / df.sqrt()).unwrap();
                worst = worst.max(rel(f_density(n, d, l).unwrap(), rhs));
            }
        }
    }
    assert!(worst < 1e-10, "worst {worst:e}");
}

#[test]
fn eigenpair_density_integrates_to_count() {
    for n in 2..=7u32 {
        for d in 1..=5u32 {
            let s = ProblemShape::new(n, d).unwrap();
            let nf = n as f64;
            let upper = 12.0 + 2.0 * nf.sqrt() * (d as f64).sqrt();
            let integral =
                2.0 * adaptive_simpson(|l| j_density(n, d, l).unwrap(), 0.0, upper, 32, 1e-14);
            let lhs = PI.sqrt().powi(n as i32) / gamma(nf / 2.0) * integral;
            let rhs = expected_count_quadrature(s, QuadratureConfig::default())
                .unwrap()
                .value;
            assert!(rel(lhs, rhs) < 1e-8, "{s}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn simpson_scheme_agrees_with_gauss_hermite() {
    let simpson = QuadratureConfig::new(16, Scheme::AdaptiveSimpson).unwrap();
    for (n, d) in [(2, 2), (4, 3), (9, 6)] {
        let s = ProblemShape::new(n, d).unwrap();
        let a = expected_count_quadrature(s, simpson).unwrap().value;
        let b = expected_count_quadrature(s, QuadratureConfig::default())
            .unwrap()
            .value;
        assert!(rel(a, b) < 1e-10, "{s}");
    }
}

#[test]
fn monte_carlo_gate() {
    for (n, t) in [(1, 0.0), (2, 0.5), (3, 1.0), (5, 2.0), (40, 0.0)] {
        let est = mc_abs_det(n, t, 20_000, 99).unwrap();
        let exact = expected_abs_det(n, t).unwrap();
        assert!(est.within(exact, 3.0), "({n},{t}): {est:?} vs {exact}");
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let a = mc_abs_det(4, 1.0, 500, 5).unwrap();
    let b = mc_abs_det(4, 1.0, 500, 5).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.samples, 500);
    assert_eq!(a.seed, 5);
}

proptest! {
    #[test]
    fn densities_are_even(n in 1u32..=15, d in 1u32..=8, l in 0.0f64..8.0) {
        prop_assert_eq!(f_density(n, d, l).unwrap(), f_density(n, d, -l).unwrap());
        let m = n + 1;
        prop_assert_eq!(j_density(m, d, l).unwrap(), j_density(m, d, -l).unwrap());
    }

    #[test]
    fn density_positive(n in 1u32..=30, d in 1u32..=10, l in -10.0f64..10.0) {
        prop_assert!(f_density(n, d, l).unwrap() > 0.0);
        prop_assert!(j_density(n + 1, d, l).unwrap() >= 0.0);
    }
}
