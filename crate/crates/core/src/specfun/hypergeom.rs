//! Gauss hypergeometric function with first parameter fixed at one.
//!
//! Two parameter families get exact finite-sum evaluation:
//!
//! * `b = n - 1/2, c = 3/2`
//! * `b = n - 1/2, c = (n + 1)/2`
//!
//! These are the ones whose argument approaches 1 as the degree grows,
//! where the raw series is hopeless. The sums alternate; they are
//! accumulated in double-double and, when the measured cancellation is
//! larger than [`CANCELLATION_LIMIT`], replaced by the incomplete-beta
//! representation evaluated with its continued fraction.

use super::beta::{binomial_complement_sum, binomial_power_sum, ln_incomplete_beta, BinomialSum};
use super::SpecialValue;
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Above this term-to-result ratio the finite sums are abandoned for the
/// continued-fraction route.
pub const CANCELLATION_LIMIT: f64 = 1e6;

const SERIES_MAX_TERMS: usize = 10_000_000;
const CF_REL_ERROR: f64 = 64.0 * f64::EPSILON;

/// Parameter family of `₂F₁(1, n - 1/2; c; x)` that has a closed finite form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// c = 3/2
    ThreeHalves,
    /// c = (n + 1)/2
    HalfShifted,
}

/// Which evaluation path produced a family value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    FiniteSum,
    ContinuedFraction,
}

/// A family value in log form: `value = exp(ln_value)`.
#[derive(Clone, Copy, Debug)]
pub struct FamilyValue {
    pub ln_value: f64,
    pub rel_error: f64,
    pub path: EvalPath,
}

impl FamilyValue {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// Recognises `b = n - 1/2` (integer `n >= 2`) together with one of the two
/// closed-form `c` values.
pub fn family_of(b: f64, c: f64) -> Option<(u32, Family)> {
    let n = b + 0.5;
    if n.fract() != 0.0 || n < 2.0 || n > u32::MAX as f64 {
        return None;
    }
    if c == 1.5 {
        Some((n as u32, Family::ThreeHalves))
    } else if c == (n + 1.0) / 2.0 {
        Some((n as u32, Family::HalfShifted))
    } else {
        None
    }
}

fn ln_dd(x: DoubleDouble) -> f64 {
    // ln(hi + lo) = ln(hi) + lo/hi to first order
    x.hi.ln() + x.lo / x.hi
}

fn finite_rel_error(s: &BinomialSum) -> f64 {
    s.cancellation() * DoubleDouble::EPSILON * 16.0 + 4.0 * f64::EPSILON
}

/// `₂F₁(1, n - 1/2; c; x)` for the closed families, with `x` in double-double.
pub fn family_2f1(n: u32, family: Family, x: DoubleDouble) -> Result<FamilyValue> {
    if n < 2 {
        return Err(Error::domain(format!("family needs n >= 2, got {n}")));
    }
    let xf = x.to_f64();
    if !(0.0..1.0).contains(&xf) {
        return Err(Error::domain(format!("₂F₁ needs 0 <= x < 1, got {xf}")));
    }
    if xf == 0.0 {
        return Ok(FamilyValue {
            ln_value: 0.0,
            rel_error: 0.0,
            path: EvalPath::FiniteSum,
        });
    }
    let nf = n as f64;
    let ln_w = ln_dd(DoubleDouble::ONE - x);
    let ln_x = ln_dd(x);
    match family {
        Family::ThreeHalves => {
            let s = binomial_power_sum(DoubleDouble::from_f64(0.5), n - 1, x);
            if s.cancellation() <= CANCELLATION_LIMIT {
                return Ok(FamilyValue {
                    ln_value: ln_dd(s.value) - std::f64::consts::LN_2 - (nf - 1.0) * ln_w,
                    rel_error: finite_rel_error(&s),
                    path: EvalPath::FiniteSum,
                });
            }
            // (1/2)(1-x)^{1-n} x^{-1/2} B(1/2, n-1, x)
            let lb = ln_incomplete_beta(0.5, nf - 1.0, xf)?;
            Ok(FamilyValue {
                ln_value: -std::f64::consts::LN_2 + (1.0 - nf) * ln_w - 0.5 * ln_x + lb,
                rel_error: CF_REL_ERROR,
                path: EvalPath::ContinuedFraction,
            })
        }
        Family::HalfShifted if n.is_multiple_of(2) => {
            let k = n / 2;
            let kf = k as f64;
            let s = binomial_power_sum(DoubleDouble::from_f64(kf - 0.5), k, x);
            if s.cancellation() <= CANCELLATION_LIMIT {
                return Ok(FamilyValue {
                    ln_value: ln_dd(s.value) + ((nf - 1.0) / 2.0).ln() - kf * ln_w,
                    rel_error: finite_rel_error(&s),
                    path: EvalPath::FiniteSum,
                });
            }
            // (k-1/2)(1-x)^{-k} x^{1/2-k} B(k-1/2, k, x)
            let lb = ln_incomplete_beta(kf - 0.5, kf, xf)?;
            Ok(FamilyValue {
                ln_value: (kf - 0.5).ln() - kf * ln_w + (0.5 - kf) * ln_x + lb,
                rel_error: CF_REL_ERROR,
                path: EvalPath::ContinuedFraction,
            })
        }
        Family::HalfShifted => {
            let k = (n - 1) / 2;
            let kf = k as f64;
            let s = binomial_complement_sum(k - 1, k, x);
            if s.cancellation() <= CANCELLATION_LIMIT {
                return Ok(FamilyValue {
                    ln_value: ln_dd(s.value) + ((nf - 1.0) / 2.0).ln()
                        - (kf + 0.5) * ln_w
                        - kf * ln_x,
                    rel_error: finite_rel_error(&s),
                    path: EvalPath::FiniteSum,
                });
            }
            // k (1-x)^{-k-1/2} x^{-k} B(k, k+1/2, x)
            let lb = ln_incomplete_beta(kf, kf + 0.5, xf)?;
            Ok(FamilyValue {
                ln_value: kf.ln() - (kf + 0.5) * ln_w - kf * ln_x + lb,
                rel_error: CF_REL_ERROR,
                path: EvalPath::ContinuedFraction,
            })
        }
    }
}

/// Plain series Σ_k (b)_k/(c)_k x^k.
pub fn gauss_2f1_series(b: f64, c: f64, x: f64) -> Result<SpecialValue> {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (b + kf) / (c + kf) * x;
        sum += term;
        if term == 0.0 {
            return Ok(SpecialValue::exact(sum));
        }
        // Once terms shrink monotonically the last term bounds the tail
        // up to the geometric factor.
        let ratio = ((b + kf + 1.0) / (c + kf + 1.0) * x).abs();
        if term.abs() <= f64::EPSILON * 0.5 * sum.abs() && ratio < 1.0 {
            return Ok(SpecialValue::new(sum, term.abs()));
        }
    }
    Err(Error::Convergence(format!(
        "₂F₁(1, {b}; {c}; {x}) series did not settle within {SERIES_MAX_TERMS} terms"
    )))
}

/// `₂F₁(1, b; c; x)` for `c > 0` and `0 <= x < 1`.
pub fn gauss_2f1_unit(b: f64, c: f64, x: f64) -> Result<SpecialValue> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("₂F₁ needs c > 0, got c = {c}")));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain(format!("₂F₁ needs 0 <= x < 1, got x = {x}")));
    }
    if x == 0.0 {
        return Ok(SpecialValue::exact(1.0));
    }
    if let Some((n, family)) = family_of(b, c) {
        let fv = family_2f1(n, family, DoubleDouble::from_f64(x))?;
        let v = fv.value();
        if !v.is_finite() {
            return Err(Error::Overflow(format!("₂F₁(1, {b}; {c}; {x})")));
        }
        return Ok(SpecialValue::new(v, v * fv.rel_error));
    }
    gauss_2f1_series(b, c, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_argument() {
        assert_eq!(gauss_2f1_unit(3.7, 1.2, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn geometric_case() {
        let v = gauss_2f1_unit(1.5, 1.5, 0.5).unwrap().value;
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_case() {
        // -ln(1-x)/x
        let v = gauss_2f1_unit(1.0, 2.0, 0.5).unwrap().value;
        assert!((v - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn family_detection() {
        assert_eq!(family_of(4.5, 1.5), Some((5, Family::ThreeHalves)));
        assert_eq!(family_of(4.5, 3.0), Some((5, Family::HalfShifted)));
        assert_eq!(family_of(4.5, 2.0), None);
        assert_eq!(family_of(1.0, 1.5), None);
    }

    #[test]
    fn families_agree_with_series_away_from_one() {
        for n in 2..12u32 {
            for &x in &[0.05, 0.3, 0.6] {
                let b = n as f64 - 0.5;
                for c in [1.5, (n as f64 + 1.0) / 2.0] {
                    let fam = gauss_2f1_unit(b, c, x).unwrap().value;
                    let ser = gauss_2f1_series(b, c, x).unwrap().value;
                    assert!(((fam - ser) / ser).abs() < 1e-12, "n={n} c={c} x={x}");
                }
            }
        }
    }

    #[test]
    fn large_n_switches_to_continued_fraction() {
        let x = DoubleDouble::from_ratio(7, 9);
        let v = family_2f1(60, Family::ThreeHalves, x).unwrap();
        assert_eq!(v.path, EvalPath::ContinuedFraction);
        let small = family_2f1(6, Family::ThreeHalves, x).unwrap();
        assert_eq!(small.path, EvalPath::FiniteSum);
    }

    #[test]
    fn domain() {
        assert!(gauss_2f1_unit(1.0, 1.0, 1.0).is_err());
        assert!(gauss_2f1_unit(1.0, 0.0, 0.5).is_err());
        assert!(gauss_2f1_unit(1.0, -2.0, 0.5).is_err());
    }
}
