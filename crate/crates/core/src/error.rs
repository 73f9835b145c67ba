use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state vector has (near-)zero norm")]
    ZeroVector,
    #[error("non-finite amplitude component")]
    NonFinite,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("at least {min} parties required, got {found}")]
    TooFewParties { min: usize, found: usize },
    #[error("tally contains no rounds")]
    EmptyRun,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("no candidate within tolerance (best residual {best_residual:.3e})")]
    NoSolution { best_residual: f64 },
    #[error("no pair of distinct witnesses reproduces the observables")]
    WitnessNotFound,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
