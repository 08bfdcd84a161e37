use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid privacy budget: {0}")]
    InvalidBudget(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid counts: {0}")]
    InvalidCounts(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested configuration cannot be realised (e.g. a sampling rate
    /// that yields fewer than two sampled units).
    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
