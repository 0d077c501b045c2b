use thiserror::Error;

/// Errors raised by the simulator and the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("effective field vanishes at t = {t} ms (|h| = {magnitude:e})")]
    DegenerateField { t: f64, magnitude: f64 },

    #[error("adiabatic theory breaks down: exact level crossing, min |h| = {min_field:e}")]
    ExactCrossing { min_field: f64 },

    #[error("integration failed at t = {t} ms: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
