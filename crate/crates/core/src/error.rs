use thiserror::Error;

/// Errors raised by the physics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} out of range: {constraint} (got {value})")]
    OutOfRange {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("grid must be strictly increasing (index {index})")]
    UnorderedGrid { index: usize },

    #[error("hamiltonian is not hermitian (deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("non-unique steady state")]
    NonUniqueSteadyState,

    #[error("linear system is singular")]
    Singular,

    #[error("integrator failed at t = {time}: {reason}")]
    Integrator { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            constraint: "must be >= 0",
            value,
        })
    }
}
