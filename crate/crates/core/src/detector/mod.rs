//! Sequential projection test, whole-sample scan and repeated-run voting.

pub mod constants;
pub mod sample;
pub mod sequential;
pub mod vote;

pub use constants::{DetectorConstants, Provenance};
pub use sample::{analyse_sample, analyse_sample_with, Estimators, ScanOptions, ScanOutcome};
pub use sequential::{classify_point, classify_with_rule, Decision, SequentialRule, Verdict};
pub use vote::{declare, vote_analyse, vote_analyse_with, vote_threshold, VoteMode, VoteReport};
