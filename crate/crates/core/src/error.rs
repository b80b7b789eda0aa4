use thiserror::Error;

/// Errors raised by the simulation, metric and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A step function expected to be nondecreasing decreases at a jump.
    #[error("step function is not nondecreasing: jump at t = {t} goes from {from} to {to}")]
    NotMonotone { t: f64, from: f64, to: f64 },

    /// The coefficient model cannot be evaluated in closed form.
    #[error("unsupported coefficient model: {0}")]
    UnsupportedModel(String),

    /// One or more of the moment conditions failed for the configured tail index.
    #[error("moment conditions failed: {}", .0.join(", "))]
    ConditionsFailed(Vec<String>),

    /// The experiment configuration is invalid.
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
