//! Empirical quantiles and the starting decision band.

use crate::error::{invalid, Result};

/// Quantile of an ascending sample by linear interpolation at position `1 + (m - 1) p`.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(invalid("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("quantile level must be in [0, 1], got {p}")));
    }
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Quantile levels `((1 - α)/h, 1 - α/h)` for the lower and upper constant.
pub fn band_levels(alpha: f64, h: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if !(h >= 1.0 && h.is_finite()) {
        return Err(invalid(format!("target projections must be >= 1, got {h}")));
    }
    Ok(((1.0 - alpha) / h, 1.0 - alpha / h))
}

/// Starting `(a, b)` from an ascending sample of absolute scores.
pub fn initial_ab(sorted_scores: &[f64], alpha: f64, h: f64) -> Result<(f64, f64)> {
    let (u, v) = band_levels(alpha, h)?;
    Ok((empirical_quantile(sorted_scores, u)?, empirical_quantile(sorted_scores, v)?))
}
