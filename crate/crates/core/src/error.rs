use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A quadrature integrand produced NaN or an infinity.
    #[error("non-finite integrand value at {location}")]
    NonFinite { location: String },

    /// The combined Gaussian exponent is not negative definite, so the
    /// integral does not converge (or the caller declared the wrong decay).
    #[error("envelope is not integrable: {0}")]
    Envelope(String),

    #[error("overflow evaluating {0}")]
    Overflow(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for failures caused by the arithmetic rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::Overflow(_))
    }
}
