use thiserror::Error;

/// Errors raised by the solver library and the command-line front end.
#[derive(Debug, Error)]
pub enum SclError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("power iteration did not converge after {iterations} iterations (last relative change {last_change:e})")]
    PowerIteration { iterations: usize, last_change: f64 },

    #[error("line search failed after {backtracks} backtracks (remaining violation {violation:e})")]
    LineSearch { backtracks: usize, violation: f64 },

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SclError {
    /// Process exit code for this error: 3 for numeric failures, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SclError::PowerIteration { .. } | SclError::LineSearch { .. } => 3,
            _ => 2,
        }
    }
}

impl From<serde_json::Error> for SclError {
    fn from(e: serde_json::Error) -> Self {
        SclError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SclError>;
