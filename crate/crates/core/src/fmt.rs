//! Locale-independent numeric formatting for exported artifacts.

/// Formats `x` with 12 significant digits, trimming trailing zeros.
///
/// Plain decimal notation is used while the exponent lies in [-4, 12), and
/// `<mantissa>e<exp>` notation outside that range, so output matches the
/// conventional `%.12g` rendering: `.` decimal separator, no grouping.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // 11 fractional digits after the leading one = 12 significant digits.
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("e-notation always has an exponent");
    let exp: i32 = exp.parse().expect("exponent is a valid integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    let body = if (-4..12).contains(&exp) {
        if exp >= 0 {
            let point = exp as usize + 1;
            let int = &digits[..point];
            let frac = digits[point..].trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            let padded = format!("{}{}", "0".repeat((-exp - 1) as usize), digits);
            format!("0.{}", padded.trim_end_matches('0'))
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{}e{exp}", &digits[..1])
        } else {
            format!("{}.{frac}e{exp}", &digits[..1])
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn plain_decimals() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(10.0), "10");
        assert_eq!(sig12(45.6789), "45.6789");
        assert_eq!(sig12(-45.6789), "-45.6789");
        assert_eq!(sig12(0.001), "0.001");
        assert_eq!(sig12(16.0), "16");
    }

    #[test]
    fn scientific_outside_g_range() {
        assert_eq!(sig12(1e15), "1e15");
        assert_eq!(sig12(1.5e-7), "1.5e-7");
        assert_eq!(sig12(-2.5e13), "-2.5e13");
    }

    #[test]
    fn twelve_significant_digits_survive() {
        assert_eq!(sig12(1.23456789012345), "1.23456789012");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
        assert_eq!(sig12(0.000123456789012345), "0.000123456789012");
    }

    #[test]
    fn parse_reformat_is_stable() {
        // Printing, parsing, and printing again must reproduce the same text.
        for &x in &[
            std::f64::consts::PI,
            1.0 - 2.0 / std::f64::consts::PI,
            6.642e-4,
            49.3011223,
            1e-11,
            9.99999999999e3,
        ] {
            let once = sig12(x);
            let back: f64 = once.parse().unwrap();
            assert_eq!(sig12(back), once, "unstable rendering for {x}");
        }
    }
}
