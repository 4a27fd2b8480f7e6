//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by model evaluation, solvers, baselines, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violated a documented precondition (dimensions, ranges, NaN).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter left the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A linear system was rank-deficient beyond conditioning tolerance.
    #[error("singular system: {0}")]
    Singular(String),

    /// The closed-form noise variance came out non-positive.
    #[error("degenerate noise precision: residual variance is not positive")]
    DegenerateNoise,

    /// Every feature was pruned from the model.
    #[error("empty model: all features were pruned")]
    EmptyModel,

    /// An iterative method hit its iteration cap before reaching tolerance.
    #[error("{method} did not converge within {iterations} iterations")]
    NonConvergence { method: &'static str, iterations: usize },

    /// Two sequences that must have equal lengths did not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// A data or spec file failed to parse.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    /// Stable machine-readable tag for each variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Domain(_) => "domain",
            Error::Singular(_) => "singular_system",
            Error::DegenerateNoise => "degenerate_noise",
            Error::EmptyModel => "empty_model",
            Error::NonConvergence { .. } => "non_convergence",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Parse { .. } => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
