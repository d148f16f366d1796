use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// A function evaluation produced NaN or an infinity.
    #[error("non-finite value {value} at {at}")]
    NonFinite { at: f64, value: f64 },

    /// The adaptive integrator could not continue.
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    /// The integrator failed while evolving a particular momentum mode.
    #[error("mode k = {k}: {source}")]
    Mode {
        k: f64,
        #[source]
        source: Box<Error>,
    },

    /// A documented precondition does not hold.
    #[error("precondition violated in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}
