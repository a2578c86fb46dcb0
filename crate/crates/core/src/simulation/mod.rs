//! Covariance families, Gaussian sampling and experiment runners.

pub mod covariance;
pub mod experiment;
pub mod linalg;
pub mod reference;
pub mod report;
pub mod sampling;
pub mod tuning;

pub use covariance::{build_covariance, Covariance, CovarianceKind, CovarianceSpec, Rotation};
pub use experiment::{
    run_clean_sample_experiment, run_contamination_experiment, run_experiment, run_level_experiment,
    ExperimentConfig, ExperimentKind, ExperimentReport, RadiusBreakdown, DEFAULT_CONTAMINATION_RADII,
};
pub use reference::{reference_ab, reference_constants, ReferenceSet};
pub use sampling::{sample_gaussian, sample_on_mahalanobis_sphere, standard_normal_matrix};
pub use tuning::tuning_radius;
