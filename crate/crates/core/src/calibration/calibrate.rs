//! Monte Carlo calibration of the decision constants.

use super::bisect::{bisect_with, BisectionOutcome, BisectionSettings, BisectionStep};
use super::level::{estimate_level_with, LevelModel, LevelOptions};
use super::quantile::initial_ab;
use super::score::{simulate_score_buffered, ScoreBuffers};
use crate::detector::{DetectorConstants, Provenance};
use crate::error::{invalid, Result};
use crate::exec::{map_replicates, Execution};
use crate::rng::derive_seed;
use crate::simulation::covariance::CovarianceSpec;
use crate::stats::threshold_cnd;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_MC_SIZE: usize = 100_000;
pub const DEFAULT_LEVEL_REPS: usize = 10_000;
pub const DEFAULT_TOL_LEVEL: f64 = 0.002;
pub const DEFAULT_MAX_ITER: usize = 40;

/// Radius at which the level is controlled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type", content = "value")]
pub enum RadiusRule {
    /// `C_n^d(δ)`.
    #[default]
    Threshold,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub delta: f64,
    /// Target mean number of projections at the calibration radius.
    pub h: f64,
    pub mc_size: usize,
    pub level_reps: usize,
    pub tol_level: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub radius: RadiusRule,
    /// Reuse one stream for every level evaluation during bisection.
    #[serde(default)]
    pub common_random_numbers: bool,
}

impl CalibrationTarget {
    pub fn new(n: usize, d: usize, alpha: f64, delta: f64, h: f64) -> Self {
        Self {
            n,
            d,
            alpha,
            delta,
            h,
            mc_size: DEFAULT_MC_SIZE,
            level_reps: DEFAULT_LEVEL_REPS,
            tol_level: DEFAULT_TOL_LEVEL,
            max_iter: DEFAULT_MAX_ITER,
            radius: RadiusRule::Threshold,
            common_random_numbers: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.d == 0 {
            return Err(invalid(format!("need n >= 2 and d >= 1, got n={}, d={}", self.n, self.d)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!("delta must be in (0, 1), got {}", self.delta)));
        }
        if !(self.h >= 1.0 && self.h.is_finite()) {
            return Err(invalid(format!("target projections must be >= 1, got {}", self.h)));
        }
        if self.mc_size == 0 || self.level_reps == 0 {
            return Err(invalid("Monte Carlo sizes must be positive"));
        }
        if !(self.tol_level > 0.0) {
            return Err(invalid("level tolerance must be positive"));
        }
        if let RadiusRule::Fixed(t) = self.radius {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid(format!("fixed radius must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn radius_value(&self) -> Result<f64> {
        match self.radius {
            RadiusRule::Threshold => Ok(threshold_cnd(self.n, self.d, self.delta)?.c_nd),
            RadiusRule::Fixed(t) => Ok(t),
        }
    }

    fn settings(&self) -> BisectionSettings {
        BisectionSettings { alpha: self.alpha, tol_level: self.tol_level, max_iter: self.max_iter }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub constants: DetectorConstants,
    pub estimated_level: f64,
    pub estimated_mean_projections: f64,
    pub bisection_iterations: usize,
    /// Quantile-based band before bisection.
    pub initial_a: f64,
    pub initial_b: f64,
    pub radius: f64,
    pub seed: u64,
    pub trace: Vec<BisectionStep>,
}

/// Calibrate with a master seed drawn from `rng`.
pub fn calibrate<R: Rng + ?Sized>(target: &CalibrationTarget, rng: &mut R) -> Result<CalibrationResult> {
    calibrate_with(target, Execution::default(), rng.random())
}

/// Absolute scores of `count` independent replicates at radius `t`.
pub fn simulate_scores(n: usize, d: usize, t: f64, count: usize, exec: Execution, seed: u64) -> Result<Vec<f64>> {
    map_replicates(exec, seed, count, |_, rng| simulate_score_buffered(n, d, t, rng, &mut ScoreBuffers::default()))
        .into_iter()
        .collect()
}

pub fn calibrate_with(target: &CalibrationTarget, exec: Execution, seed: u64) -> Result<CalibrationResult> {
    target.validate()?;
    let t = target.radius_value()?;
    let mut scores = simulate_scores(target.n, target.d, t, target.mc_size, exec, derive_seed(seed, 0))?;
    scores.sort_by(f64::total_cmp);
    let (a, b0) = initial_ab(&scores, target.alpha, target.h)?;
    let outcome = bisect_for(target, a, b0, t, LevelModel::Isotropic, exec, seed)?;
    finish(target, a, b0, t, seed, outcome)
}

/// Keep `a` and re-solve for `b` with samples drawn under `spec`.
pub fn recalibrate_for_covariance(
    target: &CalibrationTarget,
    a: f64,
    b0: f64,
    spec: &CovarianceSpec,
    exec: Execution,
    seed: u64,
) -> Result<CalibrationResult> {
    target.validate()?;
    let t = target.radius_value()?;
    let outcome = bisect_for(target, a, b0, t, LevelModel::Covariance { spec: spec.clone() }, exec, seed)?;
    finish(target, a, b0, t, seed, outcome)
}

/// Bisection on `b` for a fixed `a`, standard normal model.
pub fn bisect_b<R: Rng + ?Sized>(a: f64, b0: f64, target: &CalibrationTarget, rng: &mut R) -> Result<f64> {
    target.validate()?;
    let t = target.radius_value()?;
    Ok(bisect_for(target, a, b0, t, LevelModel::Isotropic, Execution::default(), rng.random())?.b)
}

fn bisect_for(
    target: &CalibrationTarget,
    a: f64,
    b0: f64,
    t: f64,
    model: LevelModel,
    exec: Execution,
    seed: u64,
) -> Result<BisectionOutcome> {
    let options = LevelOptions { model, exec, cap: None };
    let mut evaluation = 0u64;
    bisect_with(a, b0, &target.settings(), |b| {
        evaluation += 1;
        let k = if target.common_random_numbers { 1 } else { evaluation };
        estimate_level_with(a, b, target.n, target.d, t, target.level_reps, &options, derive_seed(seed, k))
    })
}

fn finish(
    target: &CalibrationTarget,
    a: f64,
    b0: f64,
    t: f64,
    seed: u64,
    outcome: BisectionOutcome,
) -> Result<CalibrationResult> {
    let provenance = Provenance {
        source: "calibrated".into(),
        mc_size: Some(target.mc_size),
        seed: Some(seed),
        estimated_level: Some(outcome.estimate.level),
        estimated_mean_projections: Some(outcome.estimate.mean_projections),
    };
    let constants = DetectorConstants::new(a, outcome.b, target.n, target.d, target.alpha, target.delta, target.h)?
        .with_provenance(provenance);
    Ok(CalibrationResult {
        constants,
        estimated_level: outcome.estimate.level,
        estimated_mean_projections: outcome.estimate.mean_projections,
        bisection_iterations: outcome.iterations,
        initial_a: a,
        initial_b: b0,
        radius: t,
        seed,
        trace: outcome.trace,
    })
}
