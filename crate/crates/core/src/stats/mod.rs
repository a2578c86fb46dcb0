//! Numerical primitives: quantiles, the outlier threshold, random directions,
//! projections and robust location/scale.

pub mod data;
pub mod direction;
pub mod projection;
pub mod robust;
pub mod special;
pub mod threshold;

pub use data::DataMatrix;
pub use direction::{sample_unit_direction, Direction};
pub use projection::project_scores;
pub use robust::{madn, median, RobustLocationScale};
pub use special::{chi2_cdf, chi2_quantile, normal_quantile, q3, regularized_gamma};
pub use threshold::{threshold_cnd, Threshold};
