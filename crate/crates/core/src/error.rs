use thiserror::Error;

/// Failure classes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("accuracy error: {message} (best estimate {best_estimate:e})")]
    Accuracy { message: String, best_estimate: f64 },

    /// The integrand produced a non-finite value at an interior node.
    #[error("integrand returned {value} at x = {x:e}")]
    Integrand { x: f64, value: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn accuracy(msg: impl Into<String>, best_estimate: f64) -> Self {
        Error::Accuracy {
            message: msg.into(),
            best_estimate,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
