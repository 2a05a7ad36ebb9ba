use thiserror::Error;

/// Errors produced by the detection library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter left its mathematical domain (e.g. nonpositive rate).
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at a point where the intensity diverges.
    #[error("singularity: {0}")]
    Singularity(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn singularity(msg: impl Into<String>) -> Self {
        Error::Singularity(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
