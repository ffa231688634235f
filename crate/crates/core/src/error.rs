use thiserror::Error;

/// Errors raised by the simulator and its numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty support")]
    EmptySupport,
    #[error("invalid budget: k = {0}")]
    InvalidBudget(usize),
    #[error("null state")]
    NullState,
    #[error("invalid qubit count {0} (supported range is 1..=30)")]
    InvalidQubitCount(usize),
    #[error("basis index {key} out of range for {n_qubits} qubits")]
    KeyOutOfRange { key: u64, n_qubits: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid circuit parameters: {0}")]
    InvalidParams(String),
    #[error("dense reference supports at most {max} qubits, got {n}")]
    TooManyQubits { n: usize, max: usize },
    #[error("qubit count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("qubit {0} used twice")]
    SameQubit(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("malformed document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
