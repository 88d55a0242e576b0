use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented invariant.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Numerical integration left the admissible region.
    #[error("integration error: {0}")]
    Integration(String),

    /// The thermal tail beyond the Fock cutoff is too heavy.
    #[error("truncation error: tail mass {tail:.3e} above n_max = {n_max} exceeds {limit:e}; increase n_max")]
    Truncation { tail: f64, n_max: usize, limit: f64 },

    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("undefined post-measurement state: outcome {0} has zero probability")]
    UndefinedPostState(&'static str),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// True for errors raised by the numerical engines rather than by input
    /// validation.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Integration(_) | Error::Truncation { .. } | Error::UndefinedPostState(_))
    }
}
