//! The sequential random-projection test for a single point.

use super::constants::DetectorConstants;
use crate::error::{invalid, Error, Result};
use crate::stats::data::{dot, DataMatrix};
use crate::stats::direction::fill_unit_direction;
use crate::stats::projection::standardize;
use crate::stats::robust::location_scale_with;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Consecutive zero-scale projections tolerated before giving up.
pub const MAX_DEGENERATE_RETRIES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Outlier,
    Regular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub projections_used: usize,
    /// Signed standardized score of the deciding projection.
    pub final_score: f64,
}

impl Decision {
    pub fn is_outlier(&self) -> bool {
        self.verdict == Verdict::Outlier
    }
}

/// Stopping rule: keep projecting while `a <= |score| <= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialRule {
    pub a: f64,
    pub b: f64,
    pub cap: usize,
    pub max_retries: usize,
}

impl SequentialRule {
    pub fn new(a: f64, b: f64, cap: usize) -> Result<Self> {
        if !(a > 0.0 && a <= b) {
            return Err(invalid(format!("need 0 < a <= b, got a={a}, b={b}")));
        }
        if cap == 0 {
            return Err(invalid("projection cap must be at least 1"));
        }
        Ok(Self { a, b, cap, max_retries: MAX_DEGENERATE_RETRIES })
    }

    pub fn from_constants(c: &DetectorConstants, cap: usize) -> Result<Self> {
        Self::new(c.a, c.b, cap)
    }

    /// Drive the rule with a score source. `next_score` returns
    /// `Err(DegenerateProjection)` for a zero-scale projection, which is
    /// redrawn and not counted.
    pub fn run<F>(&self, mut next_score: F) -> Result<Decision>
    where
        F: FnMut() -> Result<f64>,
    {
        let mut used = 0;
        let mut degenerate = 0;
        loop {
            let score = match next_score() {
                Ok(s) => s,
                Err(Error::DegenerateProjection) => {
                    degenerate += 1;
                    if degenerate > self.max_retries {
                        return Err(Error::DegenerateData { retries: degenerate });
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            degenerate = 0;
            used += 1;
            let abs = score.abs();
            if abs < self.a {
                return Ok(Decision { verdict: Verdict::Regular, projections_used: used, final_score: score });
            }
            if abs > self.b {
                return Ok(Decision { verdict: Verdict::Outlier, projections_used: used, final_score: score });
            }
            if used >= self.cap {
                return Err(Error::CapExceeded { cap: self.cap });
            }
        }
    }
}

/// Reusable buffers for repeated projections of one sample.
#[derive(Debug, Default)]
pub(crate) struct Workspace {
    pub direction: Vec<f64>,
    pub projected: Vec<f64>,
    pub scratch: Vec<f64>,
}

/// Classify `point` against `sample` using fresh random directions.
pub fn classify_point<R: Rng + ?Sized>(
    point: &[f64],
    sample: &DataMatrix,
    constants: &DetectorConstants,
    rng: &mut R,
    cap: usize,
) -> Result<Decision> {
    constants.check_shape(sample.rows(), sample.cols())?;
    let rule = SequentialRule::from_constants(constants, cap)?;
    classify_with_rule(point, sample, &rule, rng)
}

/// [`classify_point`] without the shape check against calibrated constants.
pub fn classify_with_rule<R: Rng + ?Sized>(
    point: &[f64],
    sample: &DataMatrix,
    rule: &SequentialRule,
    rng: &mut R,
) -> Result<Decision> {
    let d = sample.cols();
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: point.len() });
    }
    if sample.rows() < 2 {
        return Err(invalid("reference sample needs at least 2 rows"));
    }
    let mut ws = Workspace { direction: vec![0.0; d], ..Default::default() };
    rule.run(|| {
        fill_unit_direction(rng, &mut ws.direction);
        sample.project_into(&ws.direction, &mut ws.projected);
        let ls = location_scale_with(&ws.projected, &mut ws.scratch);
        standardize(dot(point, &ws.direction), &ls)
    })
}
