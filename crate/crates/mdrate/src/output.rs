//! CSV and JSON artifact formatting.

use mdrate_core::Estimate;
use serde_json::{json, Value};

/// Column order of trajectory CSV files.
pub const CSV_HEADER: &str =
    "n,x,method,p_hat,stderr,log_p,normalized,rate_limsup,rate_liminf,flags";

/// 17 significant digits in scientific notation.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV line (without newline) for an estimate.
pub fn estimate_row(e: &Estimate, rate_limsup: f64, rate_liminf: f64) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        e.n,
        float(e.x),
        e.method.name(),
        float(e.p_hat),
        float(e.stderr),
        float(e.log_p),
        float(e.normalized),
        float(rate_limsup),
        float(rate_liminf),
        e.flags.names().join(";")
    )
}

/// Row for a grid point whose estimator failed.
pub fn failure_row(n: u64, x: f64, method: &str, rate_limsup: f64, rate_liminf: f64) -> String {
    let nan = float(f64::NAN);
    format!(
        "{n},{},{method},{nan},{nan},{nan},{nan},{},{},error",
        float(x),
        float(rate_limsup),
        float(rate_liminf)
    )
}

/// JSON number, or `"inf"`, `"-inf"`, `"nan"` for values JSON cannot hold.
pub fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}
