//! Fixed-precision formatting with round-half-away-from-zero.
//!
//! `format!("{:.2}", x)` rounds ties to even; here ties go away from zero.
//! The decision is made on the exact decimal expansion of the `f64`, so no
//! error is introduced by scaling.

/// Formats `x` with exactly `precision` fractional digits. Negative results
/// that round to zero print without a sign.
pub fn format_fixed(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    // Every finite f64 has a terminating expansion of at most 1074 digits.
    let exact = format!("{:.1100}", x.abs());
    let (int_part, frac_part) = exact.split_once('.').expect("fixed format has a point");
    let mut digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes().take(precision)).collect();
    let round_up = frac_part.as_bytes()[precision] >= b'5';

    if round_up {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, b'1');
                break;
            }
            i -= 1;
            if digits[i] == b'9' {
                digits[i] = b'0';
            } else {
                digits[i] += 1;
                break;
            }
        }
    }

    let split = digits.len() - precision;
    let mut out = String::with_capacity(digits.len() + 2);
    if x < 0.0 && digits.iter().any(|&d| d != b'0') {
        out.push('-');
    }
    out.push_str(std::str::from_utf8(&digits[..split]).expect("ascii"));
    if precision > 0 {
        out.push('.');
        out.push_str(std::str::from_utf8(&digits[split..]).expect("ascii"));
    }
    out
}

/// Rounds to 15 significant digits, for machine-readable result documents.
pub fn significant15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}
