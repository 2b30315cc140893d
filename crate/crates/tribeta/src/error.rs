use crate::C64;

/// Errors raised by the numerical kernels.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("solver failed to converge: {msg}")]
    NoConvergence { msg: String, partial: Vec<C64> },
    #[error("exceptional (measure-zero) input: {0}")]
    Exceptional(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
