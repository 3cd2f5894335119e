//! Crate-wide error type.

/// Everything that can go wrong while ingesting, analyzing or planning.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),

    #[error("dense representation capped at {cap} qubits, got {n}")]
    DenseCap { n: usize, cap: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("Hamiltonian has no terms above the drop tolerance")]
    EmptyHamiltonian,

    #[error("non-Hermitian input: residual imaginary coefficient {residual:e} on term '{term}'")]
    NonHermitian { term: String, residual: f64 },

    #[error("work budget exceeded during {0}; fall back to the composite bound")]
    BudgetExceeded(String),

    #[error("missing analysis input: {0}")]
    MissingAnalysis(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("terms are not pairwise anticommuting")]
    NotAnticommuting,

    #[error("no truncation order K <= {0} meets the accuracy target")]
    NoFeasibleK(usize),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
