use thiserror::Error;

/// Errors raised by the pricing engines.
#[derive(Debug, Error)]
pub enum PricingError {
    /// An argument is outside the domain of the formula being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The barrier does not lie above the spot. The Istanbul price then
    /// coincides with the geometric Asian call.
    #[error("barrier {barrier} does not exceed spot {spot}; price with the geometric Asian call")]
    Regime { spot: f64, barrier: f64 },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not reach tolerance: estimate {estimate}, error bound {error_bound}")]
    Accuracy { estimate: f64, error_bound: f64 },

    /// The truncated expansion produced a price well below zero.
    #[error("approximation returned a negative price {0}")]
    NegativePrice(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PricingError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(PricingError::Domain(msg.into()))
}
