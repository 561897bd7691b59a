use thiserror::Error;

/// Errors raised by the simulators, generators and experiment runners.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("unsupported gate on stabilizer backend: {0}")]
    UnsupportedGate(String),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("numerical state error: {0}")]
    NumericalState(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("singular fit: {0}")]
    SingularFit(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
