//! Crate-wide error type and process exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad scenario configuration: malformed file, invalid domain descriptor,
    /// unknown keys, out-of-range parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Coefficient expression failed to parse; carries the offending token.
    #[error("expression parse error at '{token}' (offset {offset}): {message}")]
    ExprParse {
        token: String,
        offset: usize,
        message: String,
    },

    /// Coefficient sampling produced a non-finite value or an inconsistent
    /// declared asymptotic value.
    #[error("coefficient error: {0}")]
    Coefficient(String),

    /// An eigensolve or linear solve did not converge within its budget.
    #[error("solver failure: {message} (best residual {best_residual:.3e})")]
    Solver { message: String, best_residual: f64 },

    /// A table or trace does not extend far enough for the requested quantity.
    #[error("range error: {0}")]
    Range(String),

    /// Cross-validation needs the eigencurve table extended to cover mu.
    #[error("table does not cover mu = {mu:.6e} (range [{lo:.6e}, {hi:.6e}]); extend the table")]
    ExtendTable { mu: f64, lo: f64, hi: f64 },

    /// The two spectral routes disagree; the pipeline refuses to report.
    #[error("cross-validation mismatch: {0}")]
    ValidationMismatch(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub fn solver(message: impl Into<String>, best_residual: f64) -> Self {
        Error::Solver {
            message: message.into(),
            best_residual,
        }
    }

    /// Process exit code: 0 success, 2 validation mismatch, 3 solver failure,
    /// 4 configuration error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ValidationMismatch(_) => 2,
            Error::Solver { .. } => 3,
            Error::Config(_) | Error::ExprParse { .. } | Error::Coefficient(_) => 4,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}
