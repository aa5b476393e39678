use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmaxError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("below construction resolution: {0}")]
    Resolution(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("ambient mismatch: {0:?} vs {1:?}")]
    Ambient((f64, f64), (f64, f64)),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no admissible window: {0}")]
    Window(String),
    #[error("cannot parse set spec `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, SmaxError>;

pub(crate) fn param(msg: impl Into<String>) -> SmaxError {
    SmaxError::Parameter(msg.into())
}
