//! Incomplete beta function and its finite binomial-sum forms.

use super::gamma::{gamma, ln_gamma, GAMMA_MAX_ARG};
use super::hypergeom::CANCELLATION_LIMIT;
use super::SpecialValue;
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// ln B(p, q).
pub fn ln_beta(p: f64, q: f64) -> f64 {
    ln_gamma(p) + ln_gamma(q) - ln_gamma(p + q)
}

/// Complete beta function B(p, q).
pub fn complete_beta(p: f64, q: f64) -> f64 {
    if p + q < GAMMA_MAX_ARG {
        gamma(p) * gamma(q) / gamma(p + q)
    } else {
        ln_beta(p, q).exp()
    }
}

fn check_domain(p: f64, q: f64, x: f64) -> Result<()> {
    if !(p > 0.0 && q > 0.0) || !p.is_finite() || !q.is_finite() {
        return Err(Error::domain(format!(
            "incomplete beta needs p, q > 0, got p = {p}, q = {q}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "incomplete beta needs 0 <= x <= 1, got x = {x}"
        )));
    }
    Ok(())
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
/// Returns (value, |last correction - 1|).
fn beta_cf(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok((h, (del - 1.0).abs()));
        }
    }
    Err(Error::Convergence(format!(
        "incomplete beta continued fraction at a = {a}, b = {b}, x = {x}"
    )))
}

/// Incomplete beta B(p, q, x) = ∫_0^x t^{p-1}(1-t)^{q-1} dt.
pub fn incomplete_beta(p: f64, q: f64, x: f64) -> Result<SpecialValue> {
    check_domain(p, q, x)?;
    if x == 0.0 {
        return Ok(SpecialValue::exact(0.0));
    }
    let complete = complete_beta(p, q);
    if x == 1.0 {
        return Ok(SpecialValue::new(complete, complete * 4.0 * EPS));
    }
    let ln_front = p * x.ln() + q * (-x).ln_1p();
    let v = if x < (p + 1.0) / (p + q + 2.0) {
        let (cf, tail) = beta_cf(p, q, x)?;
        let v = ln_front.exp() / p * cf;
        SpecialValue::new(v, v * tail)
    } else {
        let (cf, tail) = beta_cf(q, p, 1.0 - x)?;
        let rest = ln_front.exp() / q * cf;
        SpecialValue::new(complete - rest, rest * tail + complete * EPS)
    };
    if !v.value.is_finite() {
        return Err(Error::Overflow(format!("incomplete_beta({p}, {q}, {x})")));
    }
    Ok(v)
}

/// Regularized incomplete beta I_x(p, q) = B(p,q,x)/B(p,q).
pub fn regularized_incomplete_beta(p: f64, q: f64, x: f64) -> Result<f64> {
    check_domain(p, q, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    Ok((ln_incomplete_beta(p, q, x)? - ln_beta(p, q))
        .exp()
        .min(1.0))
}

/// ln B(p, q, x), usable far beyond the range where B itself is representable.
pub fn ln_incomplete_beta(p: f64, q: f64, x: f64) -> Result<f64> {
    check_domain(p, q, x)?;
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_complete = ln_beta(p, q);
    if x == 1.0 {
        return Ok(ln_complete);
    }
    let ln_front = p * x.ln() + q * (-x).ln_1p();
    if x < (p + 1.0) / (p + q + 2.0) {
        let (cf, _) = beta_cf(p, q, x)?;
        Ok(ln_front - p.ln() + cf.ln())
    } else {
        let (cf, _) = beta_cf(q, p, 1.0 - x)?;
        let ln_rest = ln_front - q.ln() + cf.ln();
        Ok(ln_complete + (-(ln_rest - ln_complete).exp()).ln_1p())
    }
}

/// An alternating finite sum accumulated in double-double, together with
/// the sum of the absolute values of its terms.
#[derive(Clone, Copy, Debug)]
pub struct BinomialSum {
    pub value: DoubleDouble,
    pub magnitude: f64,
}

impl BinomialSum {
    /// Ratio of the term magnitudes to the result; the factor by which
    /// rounding errors in the terms are amplified.
    pub fn cancellation(&self) -> f64 {
        let v = self.value.to_f64().abs();
        if v == 0.0 {
            f64::INFINITY
        } else {
            self.magnitude / v
        }
    }
}

/// Σ_{j=0}^{m-1} C(m-1, j) (-x)^j / (j + ν), the bracket of
/// B(ν, m, x) = x^ν · Σ.
pub fn binomial_power_sum(nu: DoubleDouble, m: u32, x: DoubleDouble) -> BinomialSum {
    let mut value = DoubleDouble::ZERO;
    let mut magnitude = 0.0;
    let mut binom = DoubleDouble::ONE;
    let mut xpow = DoubleDouble::ONE;
    let top = m.saturating_sub(1);
    for j in 0..m {
        let jd = DoubleDouble::from_f64(j as f64);
        let term = binom * xpow / (jd + nu);
        magnitude += term.to_f64().abs();
        if j % 2 == 0 {
            value += term;
        } else {
            value -= term;
        }
        binom = binom * DoubleDouble::from_f64((top - j) as f64)
            / DoubleDouble::from_f64((j + 1) as f64);
        xpow *= x;
        if xpow.hi == 0.0 {
            break;
        }
    }
    BinomialSum { value, magnitude }
}

/// (1 - x)^(k + 1/2) for integer k in double-double.
pub(crate) fn one_minus_pow_half(x: DoubleDouble, k: u32) -> DoubleDouble {
    let w = DoubleDouble::ONE - x;
    w.powi(k) * w.sqrt()
}

/// Σ_{j=0}^{n} (-1)^j C(n, j) (1 - (1-x)^{j+m+1/2}) / (j + m + 1/2), which
/// equals B(n + 1, m + 1/2, x).
pub fn binomial_complement_sum(n: u32, m: u32, x: DoubleDouble) -> BinomialSum {
    let mut value = DoubleDouble::ZERO;
    let mut magnitude = 0.0;
    let mut binom = DoubleDouble::ONE;
    let w = DoubleDouble::ONE - x;
    let mut wpow = one_minus_pow_half(x, m);
    for j in 0..=n {
        let s = DoubleDouble::from_f64(j as f64 + m as f64 + 0.5);
        let term = binom * (DoubleDouble::ONE - wpow) / s;
        magnitude += (binom / s).to_f64().abs() * (1.0 + wpow.to_f64().abs());
        if j % 2 == 0 {
            value += term;
        } else {
            value -= term;
        }
        binom =
            binom * DoubleDouble::from_f64((n - j) as f64) / DoubleDouble::from_f64((j + 1) as f64);
        wpow *= w;
    }
    BinomialSum { value, magnitude }
}

fn sum_to_special(value: f64, s: &BinomialSum, scale: f64) -> SpecialValue {
    let bound = (s.magnitude * DoubleDouble::EPSILON * 8.0 * scale.abs()).max(value.abs() * 1e-16);
    SpecialValue::new(value, bound)
}

/// B(ν, m, x) for positive integer m by its finite binomial form, or the
/// continued fraction when the sum cancels by more than `CANCELLATION_LIMIT`.
pub fn incomplete_beta_integer_q(nu: f64, m: u32, x: f64) -> Result<SpecialValue> {
    check_domain(nu, m as f64, x)?;
    let s = binomial_power_sum(DoubleDouble::from_f64(nu), m, DoubleDouble::from_f64(x));
    if s.cancellation() > CANCELLATION_LIMIT {
        return incomplete_beta(nu, m as f64, x);
    }
    let scale = x.powf(nu);
    Ok(sum_to_special(scale * s.value.to_f64(), &s, scale))
}

/// B(n + 1/2, m + 1, x) for non-negative integers n, m.
pub fn incomplete_beta_half_p(n: u32, m: u32, x: f64) -> Result<SpecialValue> {
    incomplete_beta_integer_q(n as f64 + 0.5, m + 1, x)
}

/// B(n + 1, m + 1/2, x) for non-negative integers n, m.
pub fn incomplete_beta_half_q(n: u32, m: u32, x: f64) -> Result<SpecialValue> {
    check_domain(n as f64 + 1.0, m as f64 + 0.5, x)?;
    let s = binomial_complement_sum(n, m, DoubleDouble::from_f64(x));
    if s.cancellation() > CANCELLATION_LIMIT {
        return incomplete_beta(n as f64 + 1.0, m as f64 + 0.5, x);
    }
    Ok(sum_to_special(s.value.to_f64(), &s, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_integrand() {
        let v = incomplete_beta(1.0, 1.0, 0.3).unwrap().value;
        assert!((v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn complete_half_one() {
        let v = incomplete_beta(0.5, 1.0, 1.0).unwrap().value;
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_antiderivative() {
        // t²/2 − 2t³/3 + t⁴/4 at 1/2
        let exact = 0.125 - 2.0 / 24.0 + 1.0 / 64.0;
        let v = incomplete_beta(2.0, 3.0, 0.5).unwrap().value;
        assert!(((v - exact) / exact).abs() < 1e-14);
    }

    #[test]
    fn domain() {
        assert!(incomplete_beta(0.0, 1.0, 0.5).is_err());
        assert!(incomplete_beta(1.0, 1.0, 1.5).is_err());
        assert!(incomplete_beta(1.0, -1.0, 0.5).is_err());
    }

    #[test]
    fn log_form_matches_direct() {
        for &(p, q, x) in &[(0.5, 20.0, 0.3), (3.0, 4.0, 0.9), (10.5, 10.0, 0.5)] {
            let direct = incomplete_beta(p, q, x).unwrap().value;
            let via_log = ln_incomplete_beta(p, q, x).unwrap().exp();
            assert!(((direct - via_log) / direct).abs() < 1e-13);
        }
    }

    #[test]
    fn finite_sums_match_continued_fraction() {
        let cf = incomplete_beta(0.5, 7.0, 0.6).unwrap().value;
        let fs = incomplete_beta_integer_q(0.5, 7, 0.6).unwrap().value;
        assert!(((cf - fs) / cf).abs() < 1e-13);
        let cf = incomplete_beta(4.0, 3.5, 0.25).unwrap().value;
        let fs = incomplete_beta_half_q(3, 3, 0.25).unwrap().value;
        assert!(((cf - fs) / cf).abs() < 1e-13);
    }

    #[test]
    fn cancellation_grows_with_m() {
        let small = binomial_power_sum(DoubleDouble::from_f64(0.5), 5, DoubleDouble::from_f64(0.9));
        let big = binomial_power_sum(DoubleDouble::from_f64(0.5), 60, DoubleDouble::from_f64(0.9));
        assert!(big.cancellation() > 1e6 * small.cancellation());
    }
}
