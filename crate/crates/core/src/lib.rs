//! Outlier detection in high-dimensional Gaussian data through standardized
//! one-dimensional random projections and a sequential stopping rule.
//!
//! A point is compared with a reference sample along random directions. Each
//! projection gives a robust score `(x·v − median) / MADN`. Projecting stops
//! as soon as the score is below `a` (regular) or above `b` (outlier). The
//! constants are calibrated by Monte Carlo so that points on the sphere of
//! radius `C_n^d(δ)` are declared outliers with probability `α`, after about
//! `h` projections on average.
//!
//! Replicated work runs on rayon when the `parallel` feature is on (default)
//! and every replicate draws from its own derived stream, so results do not
//! depend on the execution mode.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod detector;
pub mod error;
pub mod exec;
pub mod rng;
pub mod simulation;
pub mod stats;

pub use calibration::{calibrate, calibrate_with, CalibrationResult, CalibrationTarget};
pub use detector::{
    analyse_sample, classify_point, vote_analyse, Decision, DetectorConstants, Verdict, VoteMode, VoteReport,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use stats::{threshold_cnd, DataMatrix};
