use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum HsmError {
    /// A constructor or operation received an argument violating its contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Every Monte-Carlo weight vanished, so the evidence estimate is zero.
    #[error("zero evidence estimate: all likelihood values are -inf")]
    ZeroEvidence,

    /// The (scaled) interpolation matrix is numerically singular.
    #[error("EIM basis degenerate: condition estimate {cond:.3e} exceeds {limit:.3e}")]
    DegenerateBasis { cond: f64, limit: f64 },

    /// An iterative procedure hit its stage or basis budget.
    #[error("not converged: {0}")]
    NotConverged(String),

    /// A stored sample archive violates its own invariants.
    #[error("invalid inference archive: {0}")]
    InvalidArchive(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HsmError>;

impl HsmError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        HsmError::InvalidInput(msg.into())
    }
}
