use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum H3Error {
    /// A model or configuration parameter is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A closed-form curve was evaluated outside its domain (pole,
    /// invalid constants, complex regime).
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// The adaptive step controller shrank the step below the resolvable limit.
    #[error("adaptive step underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    /// A NaN or infinity appeared in the state during integration.
    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    /// The step budget of the integrator was exhausted.
    #[error("exceeded {max_steps} steps at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: u64 },
}

pub type Result<T> = std::result::Result<T, H3Error>;
