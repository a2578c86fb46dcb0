//! Median and normalized MAD.

use super::special::q3;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Location/scale pair estimated from a projected sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustLocationScale {
    pub median: f64,
    pub madn: f64,
}

/// Median of `values`, reordering them in place. Even lengths use the
/// midpoint of the two central order statistics.
///
/// Panics on an empty slice.
pub fn median_in_place(values: &mut [f64]) -> f64 {
    let len = values.len();
    assert!(len > 0, "median of an empty slice");
    let mid = len / 2;
    let (left, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("median of an empty list"));
    }
    let mut buf = values.to_vec();
    Ok(median_in_place(&mut buf))
}

/// Median and MADN of `values`, using `scratch` as working storage.
/// `values` is left untouched.
pub fn location_scale_with(values: &[f64], scratch: &mut Vec<f64>) -> RobustLocationScale {
    scratch.clear();
    scratch.extend_from_slice(values);
    let med = median_in_place(scratch);
    for (s, &v) in scratch.iter_mut().zip(values) {
        *s = (v - med).abs();
    }
    let mad = median_in_place(scratch);
    RobustLocationScale { median: med, madn: mad / q3() }
}

pub fn location_scale(values: &[f64]) -> Result<RobustLocationScale> {
    if values.is_empty() {
        return Err(invalid("location/scale of an empty list"));
    }
    Ok(location_scale_with(values, &mut Vec::with_capacity(values.len())))
}

/// Median absolute deviation from the median, divided by the 0.75 normal quantile.
pub fn madn(values: &[f64]) -> Result<f64> {
    Ok(location_scale(values)?.madn)
}
