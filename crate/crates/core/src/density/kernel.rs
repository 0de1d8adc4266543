use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::specfun::{
    gamma, ln_gamma, ln_regularized_lower, ln_regularized_upper, lower_incomplete_gamma,
    upper_incomplete_gamma,
};

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// ln of the bracket e^{x/2}Γ(m,x)/Γ(m) + 2^{m-1}(x/2)^{m/2}γ(m/2,x/2)/Γ(m)
/// for m ≥ 1. At x = 0 the second term is dropped analytically.
fn ln_bracket(m: u32, x: f64) -> Result<f64> {
    let mf = m as f64;
    let first = 0.5 * x + ln_regularized_upper(mf, x)?;
    if x == 0.0 {
        return Ok(first);
    }
    let second = (mf - 1.0) * LN_2 + 0.5 * mf * (0.5 * x).ln() + ln_gamma(0.5 * mf) - ln_gamma(mf)
        + ln_regularized_lower(0.5 * mf, 0.5 * x)?;
    Ok(log_add(first, second))
}

/// ln F_{n,d}(λ).
pub fn ln_f_density(n: u32, d: u32, lambda: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::domain("F_{n,d} needs d >= 1"));
    }
    if !lambda.is_finite() {
        return Err(Error::domain(format!(
            "F_{{n,d}} at non-finite λ = {lambda}"
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let x = lambda * lambda / d as f64;
    Ok(0.5 * n as f64 * (d as f64).ln() + ln_bracket(n, x)?)
}

/// The kernel F_{n,d}(λ) whose standard-normal expectation at index n − 1
/// is E_{n,d}. F_{0,d} = 1.
pub fn f_density(n: u32, d: u32, lambda: f64) -> Result<f64> {
    let v = ln_f_density(n, d, lambda)?.exp();
    if !v.is_finite() {
        return Err(Error::Overflow(format!("F_{{{n},{d}}}({lambda})")));
    }
    Ok(v)
}

/// ln E|det(A + tI)| for an n×n standard gaussian A.
pub fn ln_expected_abs_det(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("matrix size must be positive"));
    }
    if !t.is_finite() {
        return Err(Error::domain(format!("non-finite shift t = {t}")));
    }
    let nf = n as f64;
    let ln_pre = 0.5 * nf * LN_2 - 0.5 * PI.ln() + ln_gamma(0.5 * (nf + 1.0));
    Ok(ln_pre + ln_bracket(n, t * t)?)
}

/// E|det(A + tI)| for an n×n standard gaussian A:
/// √2ⁿ/√π · Γ((n+1)/2)/Γ(n) · (e^{t²/2}Γ(n,t²) + 2^{n-1}(t²/2)^{n/2}γ(n/2,t²/2)).
pub fn expected_abs_det(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("matrix size must be positive"));
    }
    let nf = n as f64;
    let x = t * t;
    // literal evaluation while everything is representable
    let literal = (|| -> Result<f64> {
        let upper = upper_incomplete_gamma(nf, x)?.value;
        let lower = if x == 0.0 {
            0.0
        } else {
            2f64.powf(nf - 1.0)
                * (0.5 * x).powf(0.5 * nf)
                * lower_incomplete_gamma(0.5 * nf, 0.5 * x)?.value
        };
        let pre = 2f64.powf(0.5 * nf) / PI.sqrt() * gamma(0.5 * (nf + 1.0)) / gamma(nf);
        Ok(pre * ((0.5 * x).exp() * upper + lower))
    })();
    match literal {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => {
            let v = ln_expected_abs_det(n, t)?.exp();
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Overflow(format!(
                    "E|det(A + tI)| at n = {n}, t = {t}"
                )))
            }
        }
    }
}

/// The eigenpair density J(e₁, λ) for n ≥ 2:
/// √d^{n-1}Γ(n/2)/√πⁿ · (e^{x/2}Γ(n-1,x)/Γ(n-1)
///   + 2^{n-2}(x/2)^{(n-1)/2}γ((n-1)/2, x/2)/Γ(n-1)) · φ(λ),  x = λ²/d.
pub fn j_density(n: u32, d: u32, lambda: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("J(e₁, λ) needs n >= 2"));
    }
    if d == 0 {
        return Err(Error::domain("J(e₁, λ) needs d >= 1"));
    }
    if !lambda.is_finite() {
        return Err(Error::domain(format!(
            "J(e₁, λ) at non-finite λ = {lambda}"
        )));
    }
    let m = (n - 1) as f64;
    let x = lambda * lambda / d as f64;
    let first = 0.5 * x + ln_regularized_upper(m, x)?;
    let bracket = if x == 0.0 {
        first
    } else {
        let second = (m - 1.0) * LN_2 + 0.5 * m * (0.5 * x).ln() + ln_gamma(0.5 * m) - ln_gamma(m)
            + ln_regularized_lower(0.5 * m, 0.5 * x)?;
        log_add(first, second)
    };
    let nf = n as f64;
    let ln_pre = 0.5 * m * (d as f64).ln() + ln_gamma(0.5 * nf) - 0.5 * nf * PI.ln();
    let ln_phi = -0.5 * lambda * lambda - 0.5 * (2.0 * PI).ln();
    Ok((ln_pre + bracket + ln_phi).exp())
}
