//! Level, power, masking/swamping and clean-sample experiment runners.

use super::covariance::{build_covariance, Covariance, CovarianceSpec};
use super::sampling::{sample_gaussian, sample_on_mahalanobis_sphere};
use crate::detector::sample::{scan, ScanOptions};
use crate::detector::sequential::{classify_with_rule, SequentialRule};
use crate::detector::DetectorConstants;
use crate::error::{invalid, Error, Result};
use crate::exec::{map_replicates, Execution};
use crate::rng::SimRng;
use crate::stats::threshold_cnd;
use crate::stats::DataMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Planted-outlier radii, as multiples of the threshold.
pub const DEFAULT_CONTAMINATION_RADII: [f64; 5] = [1.05, 1.25, 1.5, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ExperimentKind {
    /// One point at `multiplier · C_n^d` tested against a clean sample.
    Level { multiplier: f64 },
    /// Sample with `round(0.1 n)` planted points at the given multipliers, scanned as a whole.
    Contamination { radii: Vec<f64> },
    /// Clean sample scanned as a whole.
    CleanSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub d: usize,
    pub covariance: CovarianceSpec,
    pub constants: DetectorConstants,
    pub reps: usize,
    pub seed: u64,
    /// Projection cap for level runs, round cap for scans; `None` uses `ceil(1000 h)`.
    #[serde(default)]
    pub cap: Option<usize>,
}

impl ExperimentConfig {
    pub fn cap(&self) -> usize {
        self.cap.unwrap_or_else(|| experiment_cap(self.constants.h))
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(invalid("experiment needs at least one replicate"));
        }
        if self.covariance.d != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: self.covariance.d });
        }
        self.constants.validate()?;
        self.constants.check_shape(self.n, self.d)?;
        match &self.kind {
            ExperimentKind::Level { multiplier } if !(*multiplier > 0.0 && multiplier.is_finite()) => {
                Err(invalid(format!("radius multiplier must be positive, got {multiplier}")))
            }
            ExperimentKind::Contamination { radii } if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) => {
                Err(invalid("contamination radii must be positive"))
            }
            ExperimentKind::Contamination { radii } if !radii.is_empty() && planted_count(self.n) >= self.n => {
                Err(invalid("sample too small to plant outliers"))
            }
            _ => Ok(()),
        }
    }
}

/// Cap used by the experiment runners, `ceil(1000 h)`.
pub fn experiment_cap(h: f64) -> usize {
    (1000.0 * h).ceil().max(1.0) as usize
}

/// Number of planted points for a sample of size `n`.
pub fn planted_count(n: usize) -> usize {
    (0.1 * n as f64).round() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusBreakdown {
    pub multiplier: f64,
    pub planted: usize,
    pub detected: usize,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// `C_n^d(δ)` for the design.
    pub threshold: f64,
    /// Level runs: share of rejections. Contamination: share of planted points
    /// detected. Clean sample: mean flagged fraction.
    pub rejection_proportion: f64,
    pub mean_projections: Option<f64>,
    pub projection_variance: Option<f64>,
    pub per_radius: Vec<RadiusBreakdown>,
    /// Share of clean points flagged (scan experiments only).
    pub swamping_proportion: Option<f64>,
    pub completed_reps: usize,
    pub failed_reps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl ExperimentReport {
    /// Binomial standard error of `rejection_proportion`.
    pub fn standard_error(&self) -> f64 {
        let p = self.rejection_proportion;
        let m = match &self.config.kind {
            ExperimentKind::Level { .. } => self.completed_reps,
            ExperimentKind::Contamination { .. } => self.per_radius.iter().map(|r| r.planted).sum(),
            ExperimentKind::CleanSample => self.completed_reps * self.config.n,
        };
        if m == 0 {
            return f64::NAN;
        }
        (p * (1.0 - p) / m as f64).sqrt()
    }
}

enum Shared {
    Fixed(Covariance),
    PerReplicate,
}

fn shared_covariance(spec: &CovarianceSpec, seed: u64) -> Result<Shared> {
    if spec.varies_per_replicate() {
        Ok(Shared::PerReplicate)
    } else {
        Ok(Shared::Fixed(build_covariance(spec, &mut crate::rng::from_seed(seed))?))
    }
}

fn replicate_covariance<'a>(
    shared: &'a Shared,
    spec: &CovarianceSpec,
    rng: &mut SimRng,
    owned: &'a mut Option<Covariance>,
) -> Result<&'a Covariance> {
    match shared {
        Shared::Fixed(c) => Ok(c),
        Shared::PerReplicate => Ok(owned.insert(build_covariance(spec, rng)?)),
    }
}

/// Run an experiment described by `config`.
pub fn run_experiment(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    config.validate()?;
    let threshold = threshold_cnd(config.n, config.d, config.constants.delta)?.c_nd;
    match &config.kind {
        ExperimentKind::Level { multiplier } => level(config, threshold, *multiplier, exec),
        ExperimentKind::Contamination { radii } => contamination(config, threshold, radii, exec),
        ExperimentKind::CleanSample => contamination(config, threshold, &[], exec),
    }
}

fn level(config: &ExperimentConfig, threshold: f64, multiplier: f64, exec: Execution) -> Result<ExperimentReport> {
    let rule = SequentialRule::from_constants(&config.constants, config.cap())?;
    let shared = shared_covariance(&config.covariance, config.seed)?;
    let t = multiplier * threshold;
    let outcomes = map_replicates(exec, config.seed, config.reps, |_, rng| {
        let mut owned = None;
        let cov = replicate_covariance(&shared, &config.covariance, rng, &mut owned)?;
        let sample = sample_gaussian(config.n, cov, rng)?;
        let point = sample_on_mahalanobis_sphere(cov, t, rng)?;
        classify_with_rule(&point, &sample, &rule, rng)
    });

    let (mut rejected, mut completed, mut failed) = (0usize, 0usize, 0usize);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut first_failure = None;
    for o in outcomes {
        match o {
            Ok(dec) => {
                completed += 1;
                rejected += dec.is_outlier() as usize;
                let k = dec.projections_used as f64;
                sum += k;
                sum_sq += k * k;
            }
            Err(e) => {
                failed += 1;
                first_failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let (prop, mean, var) = if completed > 0 {
        let m = completed as f64;
        let mean = sum / m;
        let var = if completed > 1 { (sum_sq - m * mean * mean) / (m - 1.0) } else { 0.0 };
        (rejected as f64 / m, Some(mean), Some(var.max(0.0)))
    } else {
        (f64::NAN, None, None)
    };
    Ok(ExperimentReport {
        config: config.clone(),
        threshold,
        rejection_proportion: prop,
        mean_projections: mean,
        projection_variance: var,
        per_radius: Vec::new(),
        swamping_proportion: None,
        completed_reps: completed,
        failed_reps: failed,
        first_failure,
    })
}

struct ScanCounts {
    flagged_clean: usize,
    detected: Vec<usize>,
}

fn contamination(config: &ExperimentConfig, threshold: f64, radii: &[f64], exec: Execution) -> Result<ExperimentReport> {
    let n = config.n;
    let planted = if radii.is_empty() { 0 } else { planted_count(n) };
    let clean = n - planted;
    let assign: Vec<usize> = (0..planted).map(|i| i % radii.len().max(1)).collect();
    let shared = shared_covariance(&config.covariance, config.seed)?;
    let c = &config.constants;
    let options = ScanOptions { round_cap: Some(config.cap()), ..ScanOptions::default() };

    let outcomes = map_replicates(exec, config.seed, config.reps, |_, rng| -> Result<ScanCounts> {
        let mut owned = None;
        let cov = replicate_covariance(&shared, &config.covariance, rng, &mut owned)?;
        let base = sample_gaussian(clean, cov, rng)?;
        let mut values = base.as_slice().to_vec();
        for &r in &assign {
            values.extend(sample_on_mahalanobis_sphere(cov, radii[r] * threshold, rng)?);
        }
        let sample = DataMatrix::new(n, config.d, values)?;
        let outcome = scan(&sample, c.a, c.b, c.h, &options, rng)?;
        let mut counts = ScanCounts { flagged_clean: 0, detected: vec![0; radii.len()] };
        for &i in &outcome.outliers {
            if i < clean {
                counts.flagged_clean += 1;
            } else {
                counts.detected[assign[i - clean]] += 1;
            }
        }
        Ok(counts)
    });

    let mut detected = vec![0usize; radii.len()];
    let (mut flagged, mut completed, mut failed) = (0usize, 0usize, 0usize);
    let mut first_failure = None;
    for o in outcomes {
        match o {
            Ok(counts) => {
                completed += 1;
                flagged += counts.flagged_clean;
                for (acc, k) in detected.iter_mut().zip(&counts.detected) {
                    *acc += k;
                }
            }
            Err(e) => {
                failed += 1;
                first_failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let per_radius: Vec<RadiusBreakdown> = radii
        .iter()
        .enumerate()
        .map(|(r, &multiplier)| {
            let planted = assign.iter().filter(|&&a| a == r).count() * completed;
            let proportion = if planted > 0 { detected[r] as f64 / planted as f64 } else { f64::NAN };
            RadiusBreakdown { multiplier, planted, detected: detected[r], proportion }
        })
        .collect();
    let swamping = if completed > 0 { flagged as f64 / (completed * clean) as f64 } else { f64::NAN };
    let total_planted: usize = per_radius.iter().map(|r| r.planted).sum();
    let rejection = if radii.is_empty() {
        swamping
    } else if total_planted > 0 {
        detected.iter().sum::<usize>() as f64 / total_planted as f64
    } else {
        f64::NAN
    };
    Ok(ExperimentReport {
        config: config.clone(),
        threshold,
        rejection_proportion: rejection,
        mean_projections: None,
        projection_variance: None,
        per_radius,
        swamping_proportion: Some(swamping),
        completed_reps: completed,
        failed_reps: failed,
        first_failure,
    })
}

fn config(
    kind: ExperimentKind,
    n: usize,
    d: usize,
    spec: &CovarianceSpec,
    constants: &DetectorConstants,
    reps: usize,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig { kind, n, d, covariance: spec.clone(), constants: constants.clone(), reps, seed, cap: None }
}

/// Rejection proportion and mean projections for points at `r · C_n^d`.
pub fn run_level_experiment<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    spec: &CovarianceSpec,
    r: f64,
    constants: &DetectorConstants,
    reps: usize,
    rng: &mut R,
) -> Result<ExperimentReport> {
    let cfg = config(ExperimentKind::Level { multiplier: r }, n, d, spec, constants, reps, rng.random());
    run_experiment(&cfg, Execution::default())
}

/// Masking and swamping with planted points at each multiplier in `radii`.
pub fn run_contamination_experiment<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    spec: &CovarianceSpec,
    radii: &[f64],
    constants: &DetectorConstants,
    reps: usize,
    rng: &mut R,
) -> Result<ExperimentReport> {
    let kind = ExperimentKind::Contamination { radii: radii.to_vec() };
    run_experiment(&config(kind, n, d, spec, constants, reps, rng.random()), Execution::default())
}

/// Mean fraction of flagged points in clean samples.
pub fn run_clean_sample_experiment<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    spec: &CovarianceSpec,
    constants: &DetectorConstants,
    reps: usize,
    rng: &mut R,
) -> Result<ExperimentReport> {
    run_experiment(&config(ExperimentKind::CleanSample, n, d, spec, constants, reps, rng.random()), Execution::default())
}
