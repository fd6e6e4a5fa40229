use thiserror::Error;

/// Errors produced by the analytic engine, the simulator and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive integration ran out of budget before meeting its tolerance.
    #[error("integration did not converge: best estimate {estimate:e} with error {error:e}")]
    NotConverged { estimate: f64, error: f64 },

    /// Any other numerical failure (non-convergent series, unbracketed root, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Invalid model or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
