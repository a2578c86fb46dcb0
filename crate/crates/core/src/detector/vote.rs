//! Repeating the sample scan and voting on the flags.

use super::constants::DetectorConstants;
use super::sample::{analyse_sample_with, ScanOptions};
use crate::error::{invalid, Result};
use crate::exec::{try_map_replicates, Execution};
use crate::stats::special::ln_gamma;
use crate::stats::DataMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteMode {
    /// Flagged more than `T·alpha` times.
    #[default]
    Proportional,
    /// Flagged more than the 0.95 quantile of Binomial(T, alpha).
    Strengthened,
    /// Flagged more than the 0.05 quantile of Binomial(T, alpha).
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteReport {
    pub runs: usize,
    pub mode: VoteMode,
    /// A point is declared when its flag count strictly exceeds this.
    pub threshold: u32,
    pub flags: Vec<u32>,
    pub declared: Vec<usize>,
}

/// Smallest `k` with `P(Binomial(trials, p) <= k) >= prob`.
pub fn binomial_quantile(trials: u32, p: f64, prob: f64) -> u32 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    let t = trials as f64;
    let ln_norm = ln_gamma(t + 1.0);
    let mut cdf = 0.0;
    for k in 0..=trials {
        let kf = k as f64;
        let ln_pmf = ln_norm - ln_gamma(kf + 1.0) - ln_gamma(t - kf + 1.0) + kf * p.ln() + (t - kf) * (1.0 - p).ln();
        cdf += ln_pmf.exp();
        if cdf >= prob - 1e-12 {
            return k;
        }
    }
    trials
}

pub fn vote_threshold(runs: u32, alpha: f64, mode: VoteMode) -> Result<u32> {
    if runs == 0 {
        return Err(invalid("number of runs must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha must be in (0, 1), got {alpha}")));
    }
    Ok(match mode {
        VoteMode::Proportional => (runs as f64 * alpha + 1e-9).floor() as u32,
        VoteMode::Strengthened => binomial_quantile(runs, alpha, 0.95),
        VoteMode::Relaxed => binomial_quantile(runs, alpha, 0.05),
    })
}

/// Points whose flag count exceeds `threshold`.
pub fn declare(flags: &[u32], threshold: u32) -> Vec<usize> {
    flags.iter().enumerate().filter(|&(_, &f)| f > threshold).map(|(i, _)| i).collect()
}

/// Run the sample scan `runs` times on independent derived streams and vote.
pub fn vote_analyse<R: Rng + ?Sized>(
    sample: &DataMatrix,
    constants: &DetectorConstants,
    runs: usize,
    mode: VoteMode,
    exec: Execution,
    rng: &mut R,
) -> Result<VoteReport> {
    vote_analyse_with(sample, constants, runs, mode, &ScanOptions::default(), exec, rng)
}

pub fn vote_analyse_with<R: Rng + ?Sized>(
    sample: &DataMatrix,
    constants: &DetectorConstants,
    runs: usize,
    mode: VoteMode,
    options: &ScanOptions,
    exec: Execution,
    rng: &mut R,
) -> Result<VoteReport> {
    let runs_u32 = u32::try_from(runs).map_err(|_| invalid("too many runs"))?;
    let threshold = vote_threshold(runs_u32, constants.alpha.min(1.0 - 1e-12), mode)?;
    constants.check_shape(sample.rows(), sample.cols())?;
    let master: u64 = rng.random();
    let outcomes = try_map_replicates(exec, master, runs, |_, r| {
        analyse_sample_with(sample, constants, options, r).map(|o| o.outliers)
    })?;
    let mut flags = vec![0u32; sample.rows()];
    for run in &outcomes {
        for &i in run {
            flags[i] += 1;
        }
    }
    let declared = declare(&flags, threshold);
    Ok(VoteReport { runs, mode, threshold, flags, declared })
}
