use thiserror::Error;

/// Errors produced by model construction, evolution, and observable extraction.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or precondition violation, reported with context.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    /// A state and an evolution plan were built over different sector sets.
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),
    /// Guard against accidentally huge dense eigenproblems.
    #[error("dense dimension {dim} exceeds the limit of {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    /// The Jacobi sweep budget was exhausted without convergence.
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    /// An observable has no defined value on the given state.
    #[error("undefined observable: {0}")]
    UndefinedObservable(String),
    /// A reduced density matrix violates trace or positivity requirements.
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
