use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock truncation must be at least 2, got {0}")]
    TruncationTooSmall(usize),

    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator is not Hermitian, max entrywise deviation {0:.3e}")]
    NotHermitian(f64),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("truncation leakage {0:.3e} exceeds tolerance; increase the Fock cutoff")]
    TruncationLeakage(f64),

    #[error("closed form requires xi = omega_m/2, relative mismatch {0:.3e}")]
    XiMismatch(f64),

    #[error("post-selection probability {0:.3e} is below threshold; conditional state undefined")]
    UndefinedState(f64),

    #[error("qubit-subspace leakage {0:.3} too large, projection meaningless")]
    ProjectionLeakage(f64),

    #[error("density matrix is not physical: {0}")]
    NotPhysical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
