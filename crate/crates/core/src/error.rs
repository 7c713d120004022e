use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum PerturbError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "unsupported exponent p = {0}; exact operator norms exist only for p in {{1, 2, inf}}"
    )]
    UnsupportedExponent(f64),

    #[error("numeric failure: {what} (residual {residual:e})")]
    NumericFailure { what: String, residual: f64 },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gap collapse: shifted gap d[{index}] = {value:e} is not positive")]
    GapCollapse { index: usize, value: f64 },

    #[error("contraction failure: certified bound {bound:.6} on ||E22 D^-1|| (limit {limit})")]
    ContractionFailure { bound: f64, limit: f64 },

    #[error("iteration did not converge after {iterations} steps (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    #[error("inconsistent eigenpair: imaginary part {0:e} of E12 q exceeds tolerance")]
    Inconsistency(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = PerturbError> = std::result::Result<T, E>;

impl PerturbError {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            PerturbError::NumericFailure { .. }
                | PerturbError::GapCollapse { .. }
                | PerturbError::ContractionFailure { .. }
                | PerturbError::NonConvergence { .. }
                | PerturbError::Inconsistency(_)
        )
    }
}
