use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("undefined separation: {0}")]
    UndefinedSeparation(String),
    #[error("accuracy target not met: {0}")]
    Accuracy(String),
    #[error("infeasible density: {0}")]
    InfeasibleDensity(String),
    #[error("coefficient range too small: {0}")]
    RangeTooSmall(String),
    #[error("rank deficient: {0}")]
    Rank(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
