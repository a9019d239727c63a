use thiserror::Error;

/// Errors produced by the scattering library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition of the operation is not met.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The question cannot be decided from the available metadata
    /// (e.g. a tabulated potential without a declared tail exponent).
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    /// Two inputs that must share structure (grid, momentum, angular
    /// momentum) do not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative scheme failed to converge.
    #[error("iteration failed to converge: {0}")]
    Iteration(String),

    /// A numerical operation failed (overflow, vanishing denominator, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Internal cross-checks disagree beyond their tolerance.
    #[error("consistency failure: {0}")]
    Consistency(String),

    /// A zero-energy resonance (or zero-energy bound state for l >= 1)
    /// was detected; the scattering length is infinite.
    #[error("zero-energy resonance detected: {0}")]
    Resonance(String),

    /// Invalid configuration value.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the caller's inputs rather than a
    /// numerical failure. The CLI maps these to exit code 2.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Precondition(_)
                | Error::Indeterminate(_)
                | Error::Contract(_)
                | Error::InvalidConfig(_)
        )
    }
}
