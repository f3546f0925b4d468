use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coefficient {0:e} is below the representable magnitude 1e-300")]
    TinyCoefficient(f64),

    #[error("refusing 2^{n} enumeration: dimension exceeds the limit of {max}")]
    ComplexityGuard { n: usize, max: usize },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("Lemke pivot budget of {budget} exhausted")]
    PivotBudget { budget: usize },

    #[error("region produced no feasible samples after {rejections} rejections")]
    EmptyRegion { rejections: usize },
}

pub type Result<T, E = PcpError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(PcpError::DimensionMismatch { expected, got });
    }
    Ok(())
}
