//! Monte Carlo calibration of `(a, b)`.

pub mod bisect;
pub mod cache;
pub mod calibrate;
pub mod level;
pub mod moments;
pub mod quantile;
pub mod score;

pub use bisect::{bisect_with, BisectionOutcome, BisectionSettings, BisectionStep, StopReason};
pub use cache::{CacheEntry, CacheKey, CacheValue, CalibrationCache};
pub use calibrate::{
    bisect_b, calibrate, calibrate_with, recalibrate_for_covariance, simulate_scores, CalibrationResult,
    CalibrationTarget, RadiusRule,
};
pub use level::{estimate_level, estimate_level_with, max_scores_before_regular, LevelEstimate, LevelModel, LevelOptions};
pub use moments::expected_projections_identity;
pub use quantile::{empirical_quantile, initial_ab};
pub use score::{simulate_score, simulate_score_full, LazyIsotropic};
