use super::data::{dot, DataMatrix};
use super::direction::Direction;
use super::robust::{location_scale_with, RobustLocationScale};
use crate::error::{Error, Result};

/// Robust standardized projection of `point` against `sample` along `direction`:
/// `(x·v - median) / MADN` of the projected sample rows.
pub fn project_scores(
    sample: &DataMatrix,
    point: &[f64],
    direction: &Direction,
) -> Result<(f64, RobustLocationScale)> {
    let d = sample.cols();
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: point.len() });
    }
    if direction.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: direction.dim() });
    }
    let mut proj = Vec::with_capacity(sample.rows());
    sample.project_into(direction.components(), &mut proj);
    let ls = location_scale_with(&proj, &mut Vec::with_capacity(proj.len()));
    let score = standardize(dot(point, direction.components()), &ls)?;
    Ok((score, ls))
}

#[inline]
pub(crate) fn standardize(value: f64, ls: &RobustLocationScale) -> Result<f64> {
    if ls.madn > 0.0 {
        Ok((value - ls.median) / ls.madn)
    } else {
        Err(Error::DegenerateProjection)
    }
}
