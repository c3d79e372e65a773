use thiserror::Error;

use crate::transform::Separation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("{0} qubits exceeds the cap of {1}")]
    Resource(usize, usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("b = {b} outside the detecting range (0, {b_upper})")]
    BOutOfRange { b: f64, b_upper: f64 },

    #[error("state is the zero vector")]
    ZeroState,

    #[error("operator chain is not invertible at qubit {0}")]
    NotInvertible(usize),

    #[error("state is not genuinely entangled")]
    NotGenuinelyEntangled,

    #[error("state is separable across qubits {:?}", .0.factor_qubits)]
    Separable(Box<Separation>),

    #[error("no ILO to SMQ form found after {0} tries (inconclusive, not a separability verdict)")]
    Inconclusive(usize),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("witness does not detect the state (expectation {0} >= 0)")]
    NotDetected(f64),

    #[error("transformed state is not in SMQ form: {0}")]
    NotSmq(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
