//! Number formatting for human-readable output.

/// Formats `x` with 6 significant digits in the style of C's `%g`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a seventh digit, e.g. 999999.5.
    let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
    if digits.trim_start_matches('0').len() > 6 && decimals > 0 {
        let d = decimals - 1;
        return trim_zeros(&format!("{x:.d$}")).to_string();
    }
    trim_zeros(&s).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Comma-separated `sig6` values.
pub fn sig6_list(v: &[f64]) -> String {
    v.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(", ")
}
