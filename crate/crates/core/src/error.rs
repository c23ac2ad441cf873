use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cookie probability {value} at {side} index {index} is outside (0,1)")]
    ProbabilityOutOfRange {
        side: &'static str,
        index: usize,
        value: f64,
    },
    #[error("environment violates the sign-consistency hypothesis; theory is unavailable")]
    HypothesisViolated,
    #[error("walk did not leave the interval within {max_steps} steps")]
    MaxStepsExceeded { max_steps: u64 },
    #[error("perturbed Brownian path did not exit before t = {t_max}")]
    TimeBudgetExceeded { t_max: f64 },
    #[error("parameter {name} = {value} must be < 1")]
    ParameterNotBelowOne { name: &'static str, value: f64 },
    #[error("rounded barrier is the origin (value {value}); the event is decided at time 0")]
    DegenerateBarrier { value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("environment regime {0} is not supported by this operation")]
    WrongRegime(String),
}

pub type Result<T> = std::result::Result<T, Error>;
