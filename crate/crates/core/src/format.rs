//! Fixed-significant-digit rendering for reports and CLI output.

/// Formats `x` with `digits` significant digits, plain decimal notation,
/// trailing zeros trimmed ("1.1547", "0.21655", "123457000").
pub fn sig_digits(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let top = digits as i32 - 1;
    if exp > top {
        // integral part alone exceeds the precision: round it
        let m = 10f64.powi(exp - top);
        return format!("{:.0}", (x / m).round() * m);
    }
    let decimals = (top - exp) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
