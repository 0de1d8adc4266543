/// `value` with `digits` significant digits; plain notation for moderate
/// magnitudes, scientific otherwise.
pub fn significant(value: f64, digits: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let exp = value.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{value:.decimals$}");
        // rounding can carry into a new digit (9.99… → 10.0…)
        let rounded: f64 = s.parse().unwrap_or(value);
        let carried = rounded.abs() >= 10f64.powi(exp + 1) && decimals > 0;
        if carried {
            format!("{value:.prec$}", prec = decimals - 1)
        } else {
            s
        }
    } else {
        format!("{value:.prec$e}", prec = digits - 1)
    }
}

/// Two decimals, the default reporting precision; values that are
/// integers up to rounding print without decimals.
pub fn two_decimals(value: f64) -> String {
    let r = value.round();
    if (value - r).abs() <= 1e-12 * value.abs().max(1.0) {
        format!("{r:.0}")
    } else {
        format!("{value:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(3f64.sqrt(), 10), "1.732050808");
        assert_eq!(significant(99081.11878358693, 10), "99081.11878");
        assert_eq!(significant(4.257474626813616e41, 10), "4.257474627e41");
        assert_eq!(significant(-0.000123456789012, 4), "-0.0001235");
        assert_eq!(significant(9.9999999999, 3), "10.0");
        assert_eq!(significant(0.0, 5), "0");
    }

    #[test]
    fn two_decimal_rounding() {
        assert_eq!(two_decimals(3.598076211353316), "3.60");
        assert_eq!(two_decimals(1.0), "1");
        assert_eq!(two_decimals(2.0000000000000004), "2");
        assert_eq!(two_decimals(1.7320508), "1.73");
    }
}
