//! Monte Carlo level of the sequential test at a fixed radius.

use super::score::LazyIsotropic;
use crate::detector::sequential::{classify_with_rule, Decision, SequentialRule};
use crate::error::{invalid, Result};
use crate::exec::{map_replicates, Execution};
use crate::simulation::covariance::{build_covariance, CovarianceSpec};
use crate::simulation::sampling::{sample_gaussian, sample_on_mahalanobis_sphere};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default projection cap for level estimation.
pub const LEVEL_CAP: usize = 1_000_000;

/// Distribution of the reference sample.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum LevelModel {
    /// Standard normal sample, simulated through [`LazyIsotropic`].
    #[default]
    Isotropic,
    /// Sample drawn under the given covariance, point on its Mahalanobis sphere.
    Covariance { spec: CovarianceSpec },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LevelOptions {
    pub model: LevelModel,
    pub exec: Execution,
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelEstimate {
    /// Share of replicates ending in `Outlier`.
    pub level: f64,
    pub mean_projections: f64,
    pub projection_variance: f64,
    pub reps: usize,
    pub rejections: usize,
    pub seed: u64,
}

impl LevelEstimate {
    pub fn standard_error(&self) -> f64 {
        (self.level * (1.0 - self.level) / self.reps as f64).sqrt()
    }

    fn from_decisions(decisions: &[Decision], seed: u64) -> Self {
        let reps = decisions.len();
        let m = reps as f64;
        let rejections = decisions.iter().filter(|d| d.is_outlier()).count();
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for d in decisions {
            let k = d.projections_used as f64;
            sum += k;
            sum_sq += k * k;
        }
        let mean = sum / m;
        let var = if reps > 1 { ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
        Self { level: rejections as f64 / m, mean_projections: mean, projection_variance: var, reps, rejections, seed }
    }
}

/// Level at radius `t` for a standard normal sample, `reps` independent tests.
pub fn estimate_level<R: Rng + ?Sized>(
    a: f64,
    b: f64,
    n: usize,
    d: usize,
    t: f64,
    reps: usize,
    rng: &mut R,
) -> Result<LevelEstimate> {
    estimate_level_with(a, b, n, d, t, reps, &LevelOptions::default(), rng.random())
}

/// Runs replicate `i` on the stream derived from `(seed, i)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_level_with(
    a: f64,
    b: f64,
    n: usize,
    d: usize,
    t: f64,
    reps: usize,
    options: &LevelOptions,
    seed: u64,
) -> Result<LevelEstimate> {
    if reps == 0 {
        return Err(invalid("level estimation needs at least one replicate"));
    }
    let rule = SequentialRule::new(a, b, options.cap.unwrap_or(LEVEL_CAP))?;
    let decisions = match &options.model {
        LevelModel::Isotropic => {
            LazyIsotropic::new(n, d, t)?;
            map_replicates(options.exec, seed, reps, |_, rng| {
                let mut sim = LazyIsotropic::new(n, d, t)?;
                sim.reset(rng);
                rule.run(|| sim.next_score(rng))
            })
        }
        LevelModel::Covariance { spec } => {
            if spec.d != d {
                return Err(invalid(format!("covariance dimension {} does not match d={d}", spec.d)));
            }
            if !(t > 0.0) {
                return Err(invalid("radius must be positive"));
            }
            let fixed = if spec.varies_per_replicate() {
                None
            } else {
                Some(build_covariance(spec, &mut crate::rng::from_seed(seed))?)
            };
            map_replicates(options.exec, seed, reps, |_, rng| {
                let owned;
                let cov = match &fixed {
                    Some(c) => c,
                    None => {
                        owned = build_covariance(spec, rng)?;
                        &owned
                    }
                };
                let sample = sample_gaussian(n, cov, rng)?;
                let point = sample_on_mahalanobis_sphere(cov, t, rng)?;
                classify_with_rule(&point, &sample, &rule, rng)
            })
        }
    };
    let decisions = decisions.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(LevelEstimate::from_decisions(&decisions, seed))
}

/// Per replicate: the largest `|score|` seen before the first score below `a`,
/// and the number of projections up to that point.
///
/// The test with constants `(a, b)` rejects exactly when this maximum exceeds `b`,
/// so one batch gives the level for every `b` at once.
pub fn max_scores_before_regular(
    a: f64,
    n: usize,
    d: usize,
    t: f64,
    reps: usize,
    exec: Execution,
    seed: u64,
) -> Result<Vec<(f64, usize)>> {
    if !(a > 0.0) {
        return Err(invalid("a must be positive"));
    }
    LazyIsotropic::new(n, d, t)?;
    map_replicates(exec, seed, reps, |_, rng| {
        let mut sim = LazyIsotropic::new(n, d, t)?;
        sim.reset(rng);
        let (mut max, mut k) = (0.0f64, 0usize);
        let mut degenerate = 0;
        loop {
            match sim.next_score(rng) {
                Ok(s) => {
                    degenerate = 0;
                    k += 1;
                    if s.abs() < a {
                        return Ok((max, k));
                    }
                    max = max.max(s.abs());
                    if k >= LEVEL_CAP {
                        return Err(crate::error::Error::CapExceeded { cap: LEVEL_CAP });
                    }
                }
                Err(crate::error::Error::DegenerateProjection) => {
                    degenerate += 1;
                    if degenerate > crate::detector::sequential::MAX_DEGENERATE_RETRIES {
                        return Err(crate::error::Error::DegenerateData { retries: degenerate });
                    }
                }
                Err(e) => return Err(e),
            }
        }
    })
    .into_iter()
    .collect()
}
