//! Whole-sample scan with masking reduction.
//!
//! Each round projects every retained point on one shared direction; the
//! median and MADN come from all retained points. Unconfirmed points beyond
//! `b` are deleted and the set of confirmed regular points is emptied;
//! otherwise unconfirmed points below `a` are confirmed regular. Confirmed
//! points are only tested again after a deletion. The scan ends when every
//! retained point has been confirmed since the last deletion.

use super::constants::DetectorConstants;
use super::sequential::MAX_DEGENERATE_RETRIES;
use crate::error::{invalid, Error, Result};
use crate::stats::data::{dot, DataMatrix};
use crate::stats::direction::fill_unit_direction;
use crate::stats::robust::{location_scale_with, RobustLocationScale};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Which points enter the per-round median/MADN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimators {
    /// All retained points, including the one being scored.
    #[default]
    LeaveIn,
    /// All retained points except the one being scored.
    LeaveOneOut,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub estimators: Estimators,
    /// Maximum number of non-degenerate rounds; `None` uses `ceil(1000 h)`.
    pub round_cap: Option<usize>,
    pub max_retries: usize,
    /// Also delete confirmed points whose score later exceeds `b`.
    pub recheck_regular: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { estimators: Estimators::LeaveIn, round_cap: None, max_retries: MAX_DEGENERATE_RETRIES, recheck_regular: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    /// Removed points, in original row indexing, ascending.
    pub outliers: Vec<usize>,
    pub rounds: usize,
}

/// Indices of the rows declared outliers by one scan.
pub fn analyse_sample<R: Rng + ?Sized>(
    sample: &DataMatrix,
    constants: &DetectorConstants,
    rng: &mut R,
) -> Result<Vec<usize>> {
    constants.check_shape(sample.rows(), sample.cols())?;
    Ok(scan(sample, constants.a, constants.b, constants.h, &ScanOptions::default(), rng)?.outliers)
}

pub fn analyse_sample_with<R: Rng + ?Sized>(
    sample: &DataMatrix,
    constants: &DetectorConstants,
    options: &ScanOptions,
    rng: &mut R,
) -> Result<ScanOutcome> {
    constants.check_shape(sample.rows(), sample.cols())?;
    scan(sample, constants.a, constants.b, constants.h, options, rng)
}

pub(crate) fn scan<R: Rng + ?Sized>(
    sample: &DataMatrix,
    a: f64,
    b: f64,
    h: f64,
    options: &ScanOptions,
    rng: &mut R,
) -> Result<ScanOutcome> {
    let n = sample.rows();
    if n < 3 {
        return Err(invalid("sample scan needs at least 3 rows"));
    }
    if !(a > 0.0 && a <= b) {
        return Err(invalid(format!("need 0 < a <= b, got a={a}, b={b}")));
    }
    let round_cap = options.round_cap.unwrap_or_else(|| (1000.0 * h).ceil() as usize).max(1);

    let mut retained: Vec<usize> = (0..n).collect();
    let mut regular = vec![false; n];
    let mut regular_count = 0usize;
    let mut removed = Vec::new();

    let mut direction = vec![0.0; sample.cols()];
    let mut projected = Vec::with_capacity(n);
    let mut scratch = Vec::with_capacity(n);
    let mut loo = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);

    let mut rounds = 0;
    let mut degenerate = 0;
    // fewer than three retained points cannot carry a meaningful median/MAD
    while retained.len() >= 3 {
        fill_unit_direction(rng, &mut direction);
        projected.clear();
        projected.extend(retained.iter().map(|&i| dot(sample.row(i), &direction)));

        scores.clear();
        let ok = match options.estimators {
            Estimators::LeaveIn => {
                let ls = location_scale_with(&projected, &mut scratch);
                if ls.madn > 0.0 {
                    scores.extend(projected.iter().map(|p| (p - ls.median) / ls.madn));
                    true
                } else {
                    false
                }
            }
            Estimators::LeaveOneOut => {
                let mut ok = true;
                for k in 0..projected.len() {
                    loo.clear();
                    loo.extend(projected.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &p)| p));
                    let ls: RobustLocationScale = location_scale_with(&loo, &mut scratch);
                    if ls.madn > 0.0 {
                        scores.push((projected[k] - ls.median) / ls.madn);
                    } else {
                        ok = false;
                        break;
                    }
                }
                ok
            }
        };
        if !ok {
            degenerate += 1;
            if degenerate > options.max_retries {
                return Err(Error::DegenerateData { retries: degenerate });
            }
            continue;
        }
        degenerate = 0;
        rounds += 1;
        if rounds > round_cap {
            return Err(Error::RoundCapExceeded { cap: round_cap });
        }

        let at_risk = |idx: usize| options.recheck_regular || !regular[idx];
        if retained.iter().zip(&scores).any(|(&idx, s)| s.abs() > b && at_risk(idx)) {
            let mut keep = Vec::with_capacity(retained.len());
            for (&idx, s) in retained.iter().zip(&scores) {
                if s.abs() > b && at_risk(idx) {
                    removed.push(idx);
                } else {
                    keep.push(idx);
                }
            }
            retained = keep;
            regular.iter_mut().for_each(|r| *r = false);
            regular_count = 0;
        } else {
            for (&idx, s) in retained.iter().zip(&scores) {
                if s.abs() < a && !regular[idx] {
                    regular[idx] = true;
                    regular_count += 1;
                }
            }
            if regular_count == retained.len() {
                break;
            }
        }
    }
    removed.sort_unstable();
    Ok(ScanOutcome { outliers: removed, rounds })
}
