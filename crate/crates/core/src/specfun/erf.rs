//! Error function via the incomplete gamma function: erf(x) = P(1/2, x²).

use super::gamma::{regularized_lower, regularized_upper};

/// Error function. Odd by construction: the negative branch negates the
/// positive one.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    if x2 < 1.5 {
        regularized_lower(0.5, x2).map(|v| v.value).unwrap_or(1.0)
    } else {
        1.0 - erfc(x)
    }
}

/// Complementary error function 1 - erf(x), accurate in the upper tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x == 0.0 {
        return 1.0;
    }
    let x2 = x * x;
    if x2 < 1.5 {
        1.0 - erf(x)
    } else {
        regularized_upper(0.5, x2).map(|v| v.value).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() < 1e-15);
        assert_eq!(erfc(40.0), 0.0);
    }

    #[test]
    fn oddness_is_exact() {
        for &x in &[0.1, 0.7, 1.2, 1.3, 2.5, 6.0] {
            assert_eq!(erf(-x).to_bits(), (-erf(x)).to_bits());
        }
    }

    #[test]
    fn tail_value() {
        // erfc(3) = 2.209049699858544e-05
        assert!(((erfc(3.0) - 2.209_049_699_858_544e-5) / 2.209_049_699_858_544e-5).abs() < 1e-13);
    }
}
