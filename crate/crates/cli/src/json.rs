//! Float formatting for machine-readable output.

use serde_json::value::RawValue;

/// 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub fn nums(xs: &[f64]) -> Vec<Box<RawValue>> {
    xs.iter().map(|&x| num(x)).collect()
}

pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}
