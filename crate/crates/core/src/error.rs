use thiserror::Error;

pub type Result<T> = std::result::Result<T, GmsError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GmsError {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series did not meet its stopping rule within the configured term budget.
    #[error("series did not converge within {terms} terms (a={a}, b={b}, c={c}, z={z})")]
    NonConvergence {
        a: f64,
        b: f64,
        c: f64,
        z: f64,
        terms: usize,
    },

    /// A simulated excursion exceeded its work budget.
    #[error("excursion exceeded the work limit of {limit} iterations")]
    RuntimeLimit { limit: u64 },

    /// A computed probability left [0, 1] by more than rounding noise.
    #[error("internal numeric error: {0}")]
    Internal(String),
}

impl GmsError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GmsError::Domain(msg.into())
    }
}
