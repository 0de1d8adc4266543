//! Truncated formal power series and coefficient extraction from the
//! generating function Σ E_{n,d} zⁿ.
//!
//! The generating function converges only for |z| < 1/√d, but coefficient
//! extraction is purely formal, so the radius never enters here.

use crate::closedform::{ExpectationValue, ProblemShape, Route};
use crate::dd::{DoubleDouble, Real};
use crate::error::{Error, Result};

/// c₀ + c₁z + … + c_N z^N modulo z^{N+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T: Real = f64> {
    coeffs: Vec<T>,
}

impl<T: Real> TruncatedSeries<T> {
    /// A series from its coefficients; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain(
                "a truncated series needs at least one coefficient",
            ));
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = c;
        TruncatedSeries { coeffs }
    }

    /// The series `z`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::constant(T::zero(), order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    /// Drops every term above z^order.
    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        TruncatedSeries {
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn scale(&self, c: T) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|k| self.coeffs[k] + other.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|k| self.coeffs[k] - other.coeffs[k]).collect(),
        }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = T::zero();
                for j in 0..=k {
                    acc = acc + self.coeffs[j] * other.coeffs[k - j];
                }
                acc
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// q with q·b = self mod z^{N+1}.
    pub fn div(&self, b: &Self) -> Result<Self> {
        let b0 = b.coeffs[0];
        if b0 == T::zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order().min(b.order());
        let mut q: Vec<T> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc = acc - b.coeffs[j] * q[k - j];
            }
            q.push(acc / b0);
        }
        Ok(TruncatedSeries { coeffs: q })
    }

    /// Principal square root (s₀ = +√a₀) by Newton's iteration
    /// s ← (s + a/s)/2, doubling the number of correct terms each step.
    pub fn sqrt(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if !(a0 > T::zero()) {
            return Err(Error::domain(format!(
                "series square root needs a positive constant term, got {:?}",
                a0
            )));
        }
        let n = self.order();
        let half = T::from_f64(0.5);
        let mut s = TruncatedSeries {
            coeffs: vec![a0.sqrt()],
        };
        let mut known = 1;
        while known < n + 1 {
            known = (2 * known).min(n + 1);
            let mut wide = s.coeffs.clone();
            wide.resize(known, T::zero());
            let wide = TruncatedSeries { coeffs: wide };
            let target = self.truncate(known - 1);
            let ratio = target.div(&wide)?;
            s = wide.add(&ratio).scale(half);
        }
        // one more pass at full length cleans the rounding of the last step
        let ratio = self.div(&s)?;
        Ok(s.add(&ratio).scale(half))
    }
}

impl TruncatedSeries<f64> {
    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.to_vec())
    }
}

pub fn series_mul<T: Real>(a: &TruncatedSeries<T>, b: &TruncatedSeries<T>) -> TruncatedSeries<T> {
    a.mul(b)
}

pub fn series_div<T: Real>(
    a: &TruncatedSeries<T>,
    b: &TruncatedSeries<T>,
) -> Result<TruncatedSeries<T>> {
    a.div(b)
}

pub fn series_sqrt<T: Real>(a: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    a.sqrt()
}

/// G(z) = z(1 − z√d + z√(d − 2z√d + 1)) / ((1 − z²)(1 − z√d)) mod z^{order+1}.
fn generating_series<T: Real>(d: u32, order: usize) -> Result<TruncatedSeries<T>> {
    let sd = T::from_f64(d as f64).sqrt();
    let z = TruncatedSeries::<T>::variable(order);
    let one = TruncatedSeries::constant(T::one(), order);
    let radicand =
        TruncatedSeries::constant(T::from_f64(d as f64 + 1.0), order).sub(&z.scale(sd + sd));
    let root = radicand.sqrt()?;
    let inner = one.sub(&z.scale(sd)).add(&z.mul(&root));
    let numerator = z.mul(&inner);
    let denominator = one.sub(&z.mul(&z)).mul(&one.sub(&z.scale(sd)));
    numerator.div(&denominator)
}

/// Coefficients of z¹..z^order of the generating function; entry `i` is
/// E_{i+1,d}. Accumulates in double-double when d > 50 and order > 30.
pub fn generating_coefficients(d: u32, order: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::domain("degree must be positive"));
    }
    if order == 0 {
        return Err(Error::domain("order must be at least 1"));
    }
    let coeffs: Vec<f64> = if d > 50 && order > 30 {
        generating_series::<DoubleDouble>(d, order)?
            .coeffs()
            .iter()
            .map(|c| c.to_f64())
            .collect()
    } else {
        generating_series::<f64>(d, order)?.coeffs().to_vec()
    };
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Overflow(format!(
            "generating-function coefficients for d = {d} up to z^{order}"
        )));
    }
    Ok(coeffs[1..].to_vec())
}

/// E_{n,d} read off the generating function.
pub fn expected_count_genfun(shape: ProblemShape) -> Result<ExpectationValue> {
    if shape.n() == 1 {
        return ExpectationValue::new(1.0, Route::GeneratingFunction, shape);
    }
    let coeffs = generating_coefficients(shape.d(), shape.n() as usize)?;
    ExpectationValue::new(
        coeffs[shape.n() as usize - 1],
        Route::GeneratingFunction,
        shape,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[f64]) -> TruncatedSeries {
        TruncatedSeries::from_f64(c).unwrap()
    }

    fn close(a: &TruncatedSeries, b: &[f64]) {
        assert_eq!(a.coeffs().len(), b.len());
        for (x, y) in a.coeffs().iter().zip(b) {
            assert!((x - y).abs() < 1e-13, "{:?} vs {:?}", a.coeffs(), b);
        }
    }

    #[test]
    fn products() {
        close(
            &s(&[1.0, 1.0, 0.0]).mul(&s(&[1.0, -1.0, 0.0])),
            &[1.0, 0.0, -1.0],
        );
        close(
            &s(&[1.0, 1.0, 0.0]).mul(&s(&[1.0, 1.0, 0.0])),
            &[1.0, 2.0, 1.0],
        );
        let a = s(&[0.3, -2.0, 5.0]);
        close(&a.mul(&s(&[1.0, 0.0, 0.0])), a.coeffs());
        // mixed orders truncate at the smaller one
        assert_eq!(s(&[1.0, 2.0]).mul(&s(&[1.0, 2.0, 3.0])).order(), 1);
    }

    #[test]
    fn quotients() {
        close(
            &s(&[1.0, 0.0, 0.0, 0.0])
                .div(&s(&[1.0, -1.0, 0.0, 0.0]))
                .unwrap(),
            &[1.0; 4],
        );
        close(
            &s(&[1.0, 0.0, -1.0]).div(&s(&[1.0, -1.0, 0.0])).unwrap(),
            &[1.0, 1.0, 0.0],
        );
        let a = s(&[2.0, 3.0, -1.0]);
        close(&a.div(&a).unwrap(), &[1.0, 0.0, 0.0]);
        assert!(matches!(
            a.div(&s(&[0.0, 1.0, 0.0])),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn square_roots() {
        close(&s(&[9.0, 0.0, 0.0]).sqrt().unwrap(), &[3.0, 0.0, 0.0]);
        close(
            &s(&[1.0, 2.0, 1.0, 0.0]).sqrt().unwrap(),
            &[1.0, 1.0, 0.0, 0.0],
        );
        close(&s(&[4.0, -4.0, 1.0]).sqrt().unwrap(), &[2.0, -1.0, 0.0]);
        assert!(s(&[0.0, 1.0]).sqrt().is_err());
        assert!(s(&[-1.0, 1.0]).sqrt().is_err());
    }

    #[test]
    fn generating_function_low_coefficients() {
        for d in 1..10 {
            let c = generating_coefficients(d, 3).unwrap();
            assert!((c[0] - 1.0).abs() < 1e-14);
            assert!((c[1] - (d as f64 + 1.0).sqrt()).abs() < 1e-13);
        }
        let c = generating_coefficients(3, 3).unwrap();
        assert!((c[1] - 2.0).abs() < 1e-14);
        assert!((c[2] - 3.598_076_211_353_316).abs() < 1e-12);
    }

    #[test]
    fn extended_precision_path() {
        let c = generating_coefficients(60, 35).unwrap();
        assert_eq!(c.len(), 35);
        assert!((c[1] - 61f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(generating_coefficients(0, 3).is_err());
        assert!(generating_coefficients(3, 0).is_err());
    }
}
