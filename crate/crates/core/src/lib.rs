//! Pricing of geometric Istanbul calls under Black–Scholes dynamics.
//!
//! The option starts as a European call and switches to a geometric Asian
//! call averaged from the first time the underlying reaches an upper barrier.
//! Three engines are provided: a closed-form approximation, adaptive
//! quadrature of the exact joint law, and Monte-Carlo simulation with an
//! optional geometric-Asian control variate.

pub mod closed_form;
pub mod error;
pub mod exec;
pub mod math_kernel;
pub mod model;
pub mod monte_carlo;
pub mod quadrature;
pub mod report;

pub use closed_form::{gac_price, gic_approx, uoc_price, ApproxPrice, PriceRegime};
pub use error::{PricingError, Result};
pub use exec::Execution;
pub use model::{IstanbulContract, MarketParams, Regime};
pub use monte_carlo::{price_mc, price_mc_with, PayoffKind, PriceEstimate, SimConfig};
pub use quadrature::gic_quadrature;
pub use report::{delta_fd, price, run_report, Differencing, Engine, Quote, ReportId, ReportSpec};
