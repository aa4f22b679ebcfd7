use thiserror::Error;

/// Errors raised by construction, validation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("refinement did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("chain validation failed: {0}")]
    ValidationFailed(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("torus ratio {link:e} differs from ambient ratio {ambient:e}")]
    NotSimilar { link: f64, ambient: f64 },

    #[error("enumerating {requested} items exceeds the budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
