use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("not a channel: {0}")]
    NotAChannel(String),

    #[error("unsupported basis conversion: {0}")]
    UnsupportedConversion(String),

    #[error("invalid phases: {0}")]
    InvalidPhase(String),

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),

    #[error("branch {index} has probability {probability:e}, below threshold")]
    ZeroProbability { index: usize, probability: f64 },

    #[error("protocol inconsistency: {0}")]
    ProtocolInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}

pub(crate) fn contract_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
