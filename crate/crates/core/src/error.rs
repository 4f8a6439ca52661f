use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// Variants fall into two families for exit-code purposes: validation-like
/// errors (bad input, bad arguments, shape mismatches) and numeric errors
/// (non-convergence, non-finite values, indefinite data).
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph `{graph}`: {reason}")]
    Validation { graph: String, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("graph with {n} nodes exceeds the size limit {limit} for `{what}`")]
    Size { what: String, n: usize, limit: usize },

    #[error("no convergence after {iterations} iterations (best value {best}, primal residual {primal_residual:.3e}, gap {gap:.3e})")]
    Convergence {
        iterations: usize,
        best: f64,
        primal_residual: f64,
        gap: f64,
    },

    #[error("mode error: {0}")]
    Mode(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in `{0}`")]
    Numeric(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by numerics rather than by malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::Numeric(_) | Error::Data(_)
        )
    }

    pub(crate) fn validation(graph: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            graph: graph.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
