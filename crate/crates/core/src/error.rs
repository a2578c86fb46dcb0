use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The projected sample has zero MADN; the caller should redraw the direction.
    #[error("degenerate projection: projected sample has zero scale")]
    DegenerateProjection,

    #[error("degenerate data: {retries} consecutive projections had zero scale")]
    DegenerateData { retries: usize },

    #[error("projection cap of {cap} exceeded without a decision")]
    CapExceeded { cap: usize },

    #[error("round cap of {cap} exceeded while scanning the sample")]
    RoundCapExceeded { cap: usize },

    #[error("bisection bracket does not straddle the target level {target} (level at upper end {upper_level})")]
    BracketFailure { target: f64, upper_level: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
