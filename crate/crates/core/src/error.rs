use thiserror::Error;

/// Errors surfaced by the simulation and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("circuit does not have the expected ansatz shape: {0}")]
    UnrecognizedAnsatz(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("integration failed: {0}")]
    IntegrationFailed(String),

    #[error("Fock truncation did not converge: fidelity shifted by {0:.3e} when adding levels")]
    FockNotConverged(f64),

    #[error("channel validation failed: {0}")]
    InvalidChannel(String),

    #[error("sampling budget exhausted after {spent} samples")]
    BudgetExhausted { spent: u64 },

    #[error("extrapolation needs {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("duplicate scale factors make the Richardson system singular")]
    DuplicateFactors,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
