//! Fixed numeric formatting shared by every CSV writer.

/// 17 significant digits in scientific notation. Rust's float formatting
/// rounds the exact binary value to nearest, ties to even.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
