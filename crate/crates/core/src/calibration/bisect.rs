//! Bisection on the upper constant with the lower one held fixed.

use super::level::LevelEstimate;
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

pub const EXPANSION_FACTOR: f64 = 1.5;
pub const MAX_EXPANSIONS: usize = 8;
pub const MIN_WIDTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionSettings {
    pub alpha: f64,
    pub tol_level: f64,
    pub max_iter: usize,
}

impl Default for BisectionSettings {
    fn default() -> Self {
        Self { alpha: 0.05, tol_level: 0.002, max_iter: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Level within tolerance of the target.
    Tolerance,
    /// Bracket narrower than [`MIN_WIDTH`].
    Width,
    MaxIterations,
    /// Already at or below the target with `b = a`.
    LowerEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub b_lo: f64,
    pub b_hi: f64,
    pub b: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionOutcome {
    pub b: f64,
    pub estimate: LevelEstimate,
    pub iterations: usize,
    pub stop: StopReason,
    pub trace: Vec<BisectionStep>,
}

/// Find `b` in `[a, ·)` whose level is `alpha`, given a level oracle that is
/// decreasing in `b`. The upper end starts at `2 b0` and grows by
/// [`EXPANSION_FACTOR`] until the level there is at most `alpha`.
pub fn bisect_with<F>(a: f64, b0: f64, settings: &BisectionSettings, mut level: F) -> Result<BisectionOutcome>
where
    F: FnMut(f64) -> Result<LevelEstimate>,
{
    if !(a > 0.0 && b0 >= a && b0.is_finite()) {
        return Err(invalid(format!("need 0 < a <= b0, got a={a}, b0={b0}")));
    }
    let alpha = settings.alpha;
    let mut trace = Vec::new();

    let at_a = level(a)?;
    trace.push(BisectionStep { b_lo: a, b_hi: a, b: a, level: at_a.level });
    if at_a.level <= alpha + settings.tol_level {
        return Ok(BisectionOutcome { b: a, estimate: at_a, iterations: 0, stop: StopReason::LowerEnd, trace });
    }

    let mut lo = a;
    let mut hi = (2.0 * b0).max(2.0 * a);
    let mut at_hi = level(hi)?;
    trace.push(BisectionStep { b_lo: lo, b_hi: hi, b: hi, level: at_hi.level });
    let mut expansions = 0;
    while at_hi.level > alpha {
        if expansions == MAX_EXPANSIONS {
            return Err(Error::BracketFailure { target: alpha, upper_level: at_hi.level });
        }
        lo = hi;
        hi *= EXPANSION_FACTOR;
        at_hi = level(hi)?;
        trace.push(BisectionStep { b_lo: lo, b_hi: hi, b: hi, level: at_hi.level });
        expansions += 1;
    }
    let mut iterations = 0;
    let mut last: Option<(f64, LevelEstimate)> = None;
    while iterations < settings.max_iter {
        let mid = 0.5 * (lo + hi);
        let est = level(mid)?;
        iterations += 1;
        trace.push(BisectionStep { b_lo: lo, b_hi: hi, b: mid, level: est.level });
        if (est.level - alpha).abs() <= settings.tol_level {
            return Ok(BisectionOutcome { b: mid, estimate: est, iterations, stop: StopReason::Tolerance, trace });
        }
        if est.level > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        last = Some((mid, est));
        if hi - lo < MIN_WIDTH {
            let b = 0.5 * (lo + hi);
            let est = level(b)?;
            trace.push(BisectionStep { b_lo: lo, b_hi: hi, b, level: est.level });
            return Ok(BisectionOutcome { b, estimate: est, iterations, stop: StopReason::Width, trace });
        }
    }
    let (b, estimate) = match last {
        Some(x) => x,
        None => (hi, at_hi),
    };
    Ok(BisectionOutcome { b, estimate, iterations, stop: StopReason::MaxIterations, trace })
}
