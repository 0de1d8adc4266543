//! Closed-form expected number of real eigenpair classes.
//!
//! Two routes: the hypergeometric representation and the explicit finite
//! sums (split by the parity of `n`). Both are evaluated in log form so the
//! finite-sum route stays usable far past the point where `d^n` overflows.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::fmt;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::specfun::{
    binomial_complement_sum, binomial_power_sum, gauss_2f1_unit, ln_gamma, ln_incomplete_beta,
    CANCELLATION_LIMIT,
};

/// Ambient dimension `n` and degree `d`; the tensor has order `d + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProblemShape {
    n: u32,
    d: u32,
}

impl ProblemShape {
    pub fn new(n: u32, d: u32) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::domain(format!(
                "shape needs n >= 1 and d >= 1, got n = {n}, d = {d}"
            )));
        }
        Ok(ProblemShape { n, d })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }
}

impl fmt::Display for ProblemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, d={})", self.n, self.d)
    }
}

/// How an expectation was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Hypergeom,
    FiniteSum,
    Quadrature,
    GeneratingFunction,
}

impl Route {
    pub const ALL: [Route; 4] = [
        Route::Hypergeom,
        Route::FiniteSum,
        Route::Quadrature,
        Route::GeneratingFunction,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Route::Hypergeom => "hypergeom",
            Route::FiniteSum => "sum",
            Route::Quadrature => "quadrature",
            Route::GeneratingFunction => "genfun",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationValue {
    pub value: f64,
    pub route: Route,
    pub shape: ProblemShape,
}

impl ExpectationValue {
    pub(crate) fn new(value: f64, route: Route, shape: ProblemShape) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Overflow(format!(
                "E at {shape} via {} is not finite",
                route.name()
            )));
        }
        Ok(ExpectationValue {
            value,
            route,
            shape,
        })
    }
}

/// D(n, d) = Σ_{i<n} d^i, the generic number of complex eigenpair classes.
/// Fails with an overflow error when the value does not fit in a `u64`.
pub fn dnd(shape: ProblemShape) -> Result<u64> {
    let d = shape.d as u64;
    let mut total: u64 = 0;
    let mut power: u64 = 1;
    for i in 0..shape.n {
        total = total
            .checked_add(power)
            .ok_or_else(|| Error::Overflow(format!("D{shape} exceeds u64")))?;
        if i + 1 < shape.n {
            power = power
                .checked_mul(d)
                .ok_or_else(|| Error::Overflow(format!("D{shape} exceeds u64")))?;
        }
    }
    Ok(total)
}

/// D(n, d) as an arbitrary-precision integer.
pub fn dnd_big(shape: ProblemShape) -> BigUint {
    let d = BigUint::from(shape.d);
    let mut total = BigUint::from(0u32);
    let mut power = BigUint::one();
    for _ in 0..shape.n {
        total += &power;
        power *= &d;
    }
    total
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * LN_2
}

/// ln D(n, d), exact-integer based.
pub fn ln_dnd(shape: ProblemShape) -> f64 {
    match dnd(shape) {
        Ok(v) => (v as f64).ln(),
        Err(_) => ln_biguint(&dnd_big(shape)),
    }
}

/// Hypergeometric route. Exact 1 for `n = 1`.
pub fn expected_count_hypergeom(shape: ProblemShape) -> Result<ExpectationValue> {
    if shape.n == 1 {
        return ExpectationValue::new(1.0, Route::Hypergeom, shape);
    }
    let n = shape.n as f64;
    let d = shape.d as f64;
    let first = gauss_2f1_unit(n - 0.5, 1.5, (d - 1.0) / (d + 1.0))?.value;
    let second = gauss_2f1_unit(n - 0.5, (n + 1.0) / 2.0, 1.0 / (d + 1.0))?.value;
    let ln_pre = (n - 1.0) * LN_2 + 0.5 * n * d.ln() + ln_gamma(n - 0.5)
        - 0.5 * PI.ln()
        - (n - 0.5) * (d + 1.0).ln()
        - ln_gamma(n);
    let bracket = 2.0 * (n - 1.0) * first + second;
    ExpectationValue::new(ln_pre.exp() * bracket, Route::Hypergeom, shape)
}

fn ln_dd(x: DoubleDouble) -> f64 {
    x.hi.ln() + x.lo / x.hi
}

fn precision(e: Error) -> Error {
    match e {
        Error::Convergence(m) => Error::Precision(m),
        other => other,
    }
}

/// ln of the two bracketed finite sums, each including its own prefactor:
/// returns (ln t1, ln t2) with E = Γ(n-1/2)/(√π Γ(n-1)) · (t1 + t2).
fn ln_sum_terms(shape: ProblemShape) -> Result<(f64, f64)> {
    let n = shape.n;
    let nf = n as f64;
    let df = shape.d as f64;
    let x = DoubleDouble::from_ratio(shape.d as i64 - 1, shape.d as i64 + 1);
    let y = DoubleDouble::from_ratio(1, shape.d as i64 + 1);

    // Σ_{j<=n-2} C(n-2,j) (-x)^j/(j+1/2) = B(1/2, n-1, x)/√x
    let s1 = binomial_power_sum(DoubleDouble::from_f64(0.5), n - 1, x);
    let ln_s1 = if s1.cancellation() <= CANCELLATION_LIMIT {
        ln_dd(s1.value)
    } else {
        ln_incomplete_beta(0.5, nf - 1.0, x.to_f64()).map_err(precision)? - 0.5 * ln_dd(x)
    };
    let ln_t1 = 0.5 * nf * df.ln() - 0.5 * (df + 1.0).ln() + ln_s1;

    let ln_s2 = if n.is_multiple_of(2) {
        // Σ (-1)^j C(k-1,j) y^{j+k-1/2}/(j+k-1/2) = B(k-1/2, k, y)
        let k = n / 2;
        let kf = k as f64;
        let s = binomial_power_sum(DoubleDouble::from_f64(kf - 0.5), k, y);
        if s.cancellation() <= CANCELLATION_LIMIT {
            (kf - 0.5) * ln_dd(y) + ln_dd(s.value)
        } else {
            ln_incomplete_beta(kf - 0.5, kf, y.to_f64()).map_err(precision)?
        }
    } else {
        // Σ (-1)^j C(k-1,j) (1-(d/(d+1))^{j+k+1/2})/(j+k+1/2) = B(k, k+1/2, y)
        let k = (n - 1) / 2;
        let kf = k as f64;
        let s = binomial_complement_sum(k - 1, k, y);
        if s.cancellation() <= CANCELLATION_LIMIT {
            ln_dd(s.value)
        } else {
            ln_incomplete_beta(kf, kf + 0.5, y.to_f64()).map_err(precision)?
        }
    };
    let ln_t2 = (nf - 2.0) * LN_2 + ln_s2;
    if !(ln_t1.is_finite() && ln_t2.is_finite()) {
        return Err(Error::Precision(format!(
            "finite sums at {shape} lost all significant digits"
        )));
    }
    Ok((ln_t1, ln_t2))
}

/// ln E_{n,d} through the finite sums. Works for shapes whose expectation
/// itself overflows an `f64`.
pub fn ln_expected_count_sum(shape: ProblemShape) -> Result<f64> {
    if shape.n == 1 {
        return Ok(0.0);
    }
    let nf = shape.n as f64;
    let (a, b) = ln_sum_terms(shape)?;
    let hi = a.max(b);
    let ln_pre = ln_gamma(nf - 0.5) - ln_gamma(nf - 1.0) - 0.5 * PI.ln();
    Ok(ln_pre + hi + ((a - hi).exp() + (b - hi).exp()).ln())
}

/// Finite-sum route. Exact 1 for `n = 1`.
pub fn expected_count_sum(shape: ProblemShape) -> Result<ExpectationValue> {
    if shape.n == 1 {
        return ExpectationValue::new(1.0, Route::FiniteSum, shape);
    }
    let nf = shape.n as f64;
    let (a, b) = ln_sum_terms(shape)?;
    let ln_pre = ln_gamma(nf - 0.5) - ln_gamma(nf - 1.0) - 0.5 * PI.ln();
    let value = (ln_pre + a).exp() + (ln_pre + b).exp();
    ExpectationValue::new(value, Route::FiniteSum, shape)
}

/// Limit of E_{n,d}/√D(n,d) for large n: √(2/π) for d = 1 and 1 otherwise.
/// For fixed n > 1 and large d the limit is 1.
pub fn ratio_limit_large_n(d: u32) -> f64 {
    if d == 1 {
        (2.0 / PI).sqrt()
    } else {
        1.0
    }
}

/// E_{n,d} / √D(n,d).
pub fn normalized_ratio(shape: ProblemShape) -> Result<f64> {
    let ln_e = ln_expected_count_sum(shape)?;
    Ok((ln_e - 0.5 * ln_dnd(shape)).exp())
}

/// Number of Z-eigenvalues given the number of real eigenpair classes.
///
/// Odd `d`: one Z-eigenvalue per class. Even `d`: the two unit
/// representatives ±v carry eigenvalues ±λ, which coincide only for λ = 0.
pub fn z_count_from_class_count(classes: u64, d: u32, zero_is_eigenvalue: bool) -> Result<u64> {
    if d == 0 {
        return Err(Error::domain("degree must be positive"));
    }
    if d % 2 == 1 {
        return Ok(classes);
    }
    if zero_is_eigenvalue {
        if classes == 0 {
            return Err(Error::domain(
                "a zero eigenvalue needs at least one real eigenpair class",
            ));
        }
        Ok(2 * classes - 1)
    } else {
        Ok(2 * classes)
    }
}
