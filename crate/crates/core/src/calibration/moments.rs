//! Projection-count moments when the sample is standard normal.

use crate::error::{invalid, Result};

/// Mean and variance of the number of projections, given the probabilities
/// `F_a = P(|Y| <= a)` and `F_b = P(|Y| <= b)` of a single score.
///
/// The count is geometric with continuation probability `F_b - F_a`.
pub fn expected_projections_identity(f_a: f64, f_b: f64) -> Result<(f64, f64)> {
    if !(0.0 <= f_a && f_a <= f_b && f_b <= 1.0) {
        return Err(invalid(format!("need 0 <= F(a) <= F(b) <= 1, got {f_a}, {f_b}")));
    }
    let p = f_b - f_a;
    if p >= 1.0 {
        return Err(invalid("F(b) - F(a) = 1: the test never stops"));
    }
    let q = 1.0 - p;
    Ok((1.0 / q, p / (q * q)))
}
