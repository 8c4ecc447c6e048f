//! Float formatting for reports and CSV cells: 10 significant digits,
//! fixed notation for moderate magnitudes and scientific otherwise, with
//! trailing zeros trimmed. Pure function of the bits, so repeated runs
//! print byte-identical output.

/// Formats with 10 significant digits. Uses fixed notation while the decimal
/// exponent lies in [-4, 9] and scientific notation outside that range.
/// Infinities print as `inf` / `-inf`, NaN as `nan`, zero as `0`.
pub fn g10(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    if x == 0.0 {
        return "0".to_string();
    }

    // The exponent is read off the rounded scientific form, so a value that
    // rounds up to the next power of ten is classified by where it lands,
    // not where it started.
    let sci = format!("{x:.9e}");
    let (mantissa, exp_text) = sci.split_once('e').expect("{:.9e} always contains an exponent");
    let exp: i32 = exp_text.parse().expect("{:.9e} exponent is a valid integer");

    if (-4..=9).contains(&exp) {
        let precision = (9 - exp).max(0) as usize;
        trim_fraction(format!("{x:.precision$}"))
    } else {
        let mantissa = trim_fraction(mantissa.to_string());
        format!("{mantissa}e{exp}")
    }
}

// Drops trailing zeros after a decimal point, and the point itself when
// nothing remains behind it.
fn trim_fraction(mut text: String) -> String {
    if text.contains('.') {
        while text.ends_with('0') {
            text.pop();
        }
        if text.ends_with('.') {
            text.pop();
        }
    }
    text
}
