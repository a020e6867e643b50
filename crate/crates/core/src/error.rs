use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("invalid {param}: {reason}")]
    Domain { param: &'static str, reason: String },

    /// The barrier channel has `E <= μB` and analytic continuation was not requested.
    #[error(
        "evanescent barrier channel at k = {k:.6e} 1/m (decay constant kappa = {kappa:.6e} 1/m); \
         kinetic energy does not exceed muB"
    )]
    EvanescentChannel { k: f64, kappa: f64 },

    /// Normalized detection probability requested for a spinor with `a = b = 0`.
    #[error("degenerate transmitted spinor: both channel moduli vanish")]
    DegenerateSpinor,

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            reason: reason.into(),
        }
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(param: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::domain(param, format!("{value} is not finite")));
    }
    if value <= 0.0 {
        return Err(Error::domain(param, format!("{value} must be > 0")));
    }
    Ok(value)
}

pub(crate) fn require_non_negative(param: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::domain(param, format!("{value} is not finite")));
    }
    if value < 0.0 {
        return Err(Error::domain(param, format!("{value} must be >= 0")));
    }
    Ok(value)
}

pub(crate) fn require_finite(param: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::domain(param, format!("{value} is not finite")));
    }
    Ok(value)
}
