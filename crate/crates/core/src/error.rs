use thiserror::Error;

/// Errors raised by the numerical toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition. `field` names the offending input.
    #[error("domain error in `{field}`: {reason}")]
    Domain { field: &'static str, reason: String },

    /// The eikonal width function has a Gamma-function pole at s = 5 and is
    /// undefined below it.
    #[error("unsupported potential exponent s = {exponent}: scattering amplitudes require s >= 6")]
    UnsupportedExponent { exponent: u32 },

    /// An integrand returned NaN or infinity.
    #[error("non-finite integrand value at quadrature node {node}")]
    NonFinite { node: usize },

    /// The angular momentum ladder could not be closed below the hard cap.
    #[error("population tail mass {tail:e} still above tolerance at j_max = {j_max}")]
    Truncation { j_max: usize, tail: f64 },

    /// The simulation time step violates the stability bound.
    #[error("time step {dt:e} s exceeds stability bound {bound:e} s")]
    Stability { dt: f64, bound: f64 },

    /// An Euler-angle oracle trajectory came too close to a coordinate pole.
    #[error("euler-angle oracle approached a pole (beta = {beta})")]
    PoleProximity { beta: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        field,
        reason: reason.into(),
    }
}

/// Fails with a domain error unless `value` is finite and strictly positive.
pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(field, format!("must be finite and > 0, got {value}")))
    }
}
