use thiserror::Error;

/// Errors raised by the numerical, circuit and scenario layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("channel is not trace preserving (max deviation {deviation:.3e})")]
    NotCptp { deviation: f64 },

    #[error("unknown gate or channel `{0}`")]
    UnknownGate(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown measurement outcome `{0}`")]
    UnknownOutcome(String),

    #[error("unknown construction `{0}`")]
    UnknownConstruction(String),

    #[error("unbound oracle `{0}`")]
    UnboundOracle(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] crate::circuit::ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
