//! Number formatting shared by labels, sentences and plots.

/// `v` rounded to `digits` significant digits, without exponent notation
/// for moderate magnitudes. Trailing zeros are kept (`0.820`).
pub fn sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{:.*e}", digits.saturating_sub(1), v);
    }
    if mag >= digits as i32 {
        let f = 10f64.powi(mag + 1 - digits as i32);
        return format!("{:.0}", (v / f).round() * f);
    }
    // Rounding can bump the magnitude (9.996 -> 10.0).
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let rounded: f64 = s.parse().unwrap_or(v);
    if rounded != 0.0 && rounded.abs().log10().floor() as i32 > mag {
        let decimals = (digits as i32 - 2 - mag).max(0) as usize;
        return format!("{v:.decimals$}");
    }
    s
}

/// Signed variant of [`sig`]: positive values get a leading `+`.
pub fn signed(v: f64, digits: usize) -> String {
    let s = sig(v, digits);
    if v > 0.0 { format!("+{s}") } else { s }
}

/// `p = 0.0123`, or `p < 0.001` below one in a thousand.
pub fn p_value(p: f64) -> String {
    if p < 0.001 {
        "p < 0.001".into()
    } else {
        format!("p = {}", sig(p, 3))
    }
}

/// Compact label for a category value: integers without decimals.
pub fn category_label(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.82, 3), "0.820");
        assert_eq!(sig(1234.5, 3), "1230");
        assert_eq!(sig(99.96, 3), "100");
        assert_eq!(sig(-0.012345, 3), "-0.0123");
        assert_eq!(sig(9.996, 3), "10.0");
        assert_eq!(sig(0.0, 3), "0.00");
        assert_eq!(sig(3.0e-7, 3), "3.00e-7");
        assert_eq!(signed(0.82, 3), "+0.820");
        assert_eq!(signed(-0.5, 3), "-0.500");
    }

    #[test]
    fn p_values() {
        assert_eq!(p_value(0.0003), "p < 0.001");
        assert_eq!(p_value(0.001), "p = 0.00100");
        assert_eq!(p_value(0.04567), "p = 0.0457");
        assert_eq!(p_value(1.0), "p = 1.00");
    }

    #[test]
    fn labels() {
        assert_eq!(category_label(1.0), "1");
        assert_eq!(category_label(-2.0), "-2");
        assert_eq!(category_label(0.25), "0.25");
    }
}
