//! Fixed three-decimal presentation of percentages.

/// Rounds half away from zero to three decimals.
pub fn round3(value: f64) -> f64 {
    let scaled = (value * 1000.0).round() / 1000.0;
    // normalise -0.0 so it never prints with a sign
    if scaled == 0.0 {
        0.0
    } else {
        scaled
    }
}

/// Formats with exactly three decimals after half-up rounding.
pub fn fmt3(value: f64) -> String {
    format!("{:.3}", round3(value))
}
