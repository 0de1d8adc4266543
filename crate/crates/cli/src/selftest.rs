use std::f64::consts::PI;

use anyhow::Result;

use realeig::closedform::{expected_count_sum, z_count_from_class_count, ProblemShape};
use realeig::density::{expected_abs_det, f_density};
use realeig::mc::{count_classes_n2, run_experiment, sample_bw_system, sturm_count};
use realeig::series::TruncatedSeries;
use realeig::specfun::{
    gamma, gauss_2f1_unit, incomplete_beta, lower_incomplete_gamma, upper_incomplete_gamma,
};

use crate::commands::max_deviation;

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e:#}"),
        },
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Runs the invariant checks, printing one line each; true when all pass.
pub fn run() -> Result<bool> {
    let checks = vec![
        check("gamma complement γ + Γ = Γ(a)", || {
            let mut worst: f64 = 0.0;
            for ai in 1..=80 {
                let a = ai as f64 * 0.5;
                for xi in 0..=50 {
                    let x = xi as f64;
                    let s =
                        lower_incomplete_gamma(a, x)?.value + upper_incomplete_gamma(a, x)?.value;
                    worst = worst.max(rel(s, gamma(a)));
                }
            }
            Ok((worst < 1e-11, format!("max rel error {worst:.2e}")))
        }),
        check("₂F₁ against incomplete beta", || {
            let mut worst: f64 = 0.0;
            for n in 2..=12 {
                let b = n as f64 - 0.5;
                for c in [1.5, (n as f64 + 1.0) / 2.0] {
                    for x in [0.1, 0.5, 0.9] {
                        let lhs = gauss_2f1_unit(b, c, x)?.value;
                        let rhs = (c - 1.0)
                            * (1.0 - x).powf(c - b - 1.0)
                            * x.powf(1.0 - c)
                            * incomplete_beta(c - 1.0, b - c + 1.0, x)?.value;
                        worst = worst.max(rel(lhs, rhs));
                    }
                }
            }
            Ok((worst < 1e-10, format!("max rel error {worst:.2e}")))
        }),
        check("route agreement n ≤ 12, d ≤ 8", || {
            let dev = max_deviation(12, 8)?;
            Ok((dev < 1e-8, format!("max pairwise deviation {dev:.2e}")))
        }),
        check("E_{1,d} = 1", || {
            let ok = (1..=20).all(|d| {
                expected_count_sum(ProblemShape::new(1, d).unwrap()).map(|v| v.value) == Ok(1.0)
            });
            Ok((ok, String::new()))
        }),
        check("closed values √2, √3, 2", || {
            let mut worst: f64 = 0.0;
            for (d, want) in [(1, 2f64.sqrt()), (2, 3f64.sqrt()), (3, 2.0)] {
                let v = expected_count_sum(ProblemShape::new(2, d)?)?.value;
                worst = worst.max(rel(v, want));
            }
            Ok((worst < 1e-10, format!("max rel error {worst:.2e}")))
        }),
        check("determinant moment identity", || {
            let mut worst: f64 = 0.0;
            for n in 1..=10u32 {
                for d in 1..=6u32 {
                    for l in [0.0, 0.5, 1.0, 2.0, 5.0] {
                        let nf = n as f64;
                        let rhs = (d as f64).sqrt().powi(n as i32) * PI.sqrt()
                            / (2f64.sqrt().powi(n as i32) * gamma((nf + 1.0) / 2.0))
                            * expected_abs_det(n, l / (d as f64).sqrt())?;
                        worst = worst.max(rel(f_density(n, d, l)?, rhs));
                    }
                }
            }
            Ok((worst < 1e-10, format!("max rel error {worst:.2e}")))
        }),
        check("series sqrt/div round trip", || {
            let a = TruncatedSeries::from_f64(&[2.0, -1.0, 0.5, 3.0, -0.25, 1.0])?;
            let s = a.sqrt()?;
            let back = s.mul(&s);
            let q = a.mul(&s).div(&s)?;
            let err = a
                .coeffs()
                .iter()
                .zip(back.coeffs())
                .zip(q.coeffs())
                .map(|((x, y), z)| (x - y).abs().max((x - z).abs()))
                .fold(0.0, f64::max);
            Ok((err < 1e-12, format!("max coefficient error {err:.2e}")))
        }),
        check("Sturm counts", || {
            let ok =
                sturm_count(&[1.0, 0.0, 1.0])? == 0 && sturm_count(&[0.0, -1.0, 0.0, 1.0])? == 3;
            let f = sample_bw_system(ProblemShape::new(2, 5)?, 1);
            let c = count_classes_n2(&f)?;
            Ok((
                ok && c <= 6 && c % 2 == 0,
                format!("sample (2,5) count {c}"),
            ))
        }),
        check("Z-eigenvalue relation", || {
            let ok = z_count_from_class_count(4, 3, false)? == 4
                && z_count_from_class_count(3, 2, false)? == 6
                && z_count_from_class_count(3, 2, true)? == 5;
            Ok((ok, String::new()))
        }),
        check("sampled (2,2) mean near √3", || {
            let r = run_experiment(ProblemShape::new(2, 2)?, 20_000, 1)?;
            r.histogram.check_invariants()?;
            let z = r.estimate.z_score(3f64.sqrt());
            Ok((
                z < 4.0,
                format!("mean {:.4}, {z:.2} std errors", r.estimate.mean),
            ))
        }),
        check("sampled (3,2) counts odd and ≤ 7", || {
            let r = run_experiment(ProblemShape::new(3, 2)?, 50, 1)?;
            r.histogram.check_invariants()?;
            Ok((
                true,
                format!(
                    "mean {:.3} over {} samples",
                    r.estimate.mean, r.estimate.samples
                ),
            ))
        }),
    ];
    let mut all = true;
    for c in &checks {
        all &= c.passed;
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{tag}  {}", c.name);
        } else {
            println!("{tag}  {}  ({})", c.name, c.detail);
        }
    }
    println!(
        "{} of {} checks passed",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    Ok(all)
}
