use std::fmt;

/// A command failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or bad input data; exit code 2.
    Usage(String),
    /// Internal or statistical failure; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn failure(msg: impl Into<String>) -> Self {
        Self::Failure(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Failure(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rpod::Error> for CliError {
    fn from(e: rpod::Error) -> Self {
        match e {
            rpod::Error::InvalidArgument(_) | rpod::Error::DimensionMismatch { .. } => Self::Usage(e.to_string()),
            _ => Self::Failure(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
