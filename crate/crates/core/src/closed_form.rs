//! Analytical prices: the second-order approximation of the geometric Istanbul
//! call, the continuous geometric Asian call and the up-and-out call.

use crate::error::{domain, PricingError, Result};
use crate::math_kernel::{norm_cdf, norm_pdf, norm_sf};
use crate::model::{derive_params, DerivedParams, IstanbulContract, MarketParams, Regime};

/// Below this barrier distance `log(B/S₀)/σ` the barrier is treated as already hit.
const BARRIER_AT_SPOT: f64 = 1e-8;
/// Negative outputs down to `−NEGATIVE_CLAMP·S₀` are truncation noise.
const NEGATIVE_CLAMP: f64 = 1e-9;

/// Branch of the analytical price that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceRegime {
    /// `S₀ < B ≤ K`.
    StrikeAtOrAboveBarrier,
    /// `S₀ < B`, `K < B`.
    StrikeBelowBarrier,
    /// `S₀ ≥ B`: averaging starts at inception, so the price is the geometric Asian call.
    AsianCoincidence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxPrice {
    pub value: f64,
    pub regime: PriceRegime,
    /// Coefficients used; `None` on the Asian branch.
    pub coefficients: Option<DerivedParams>,
    /// The drift was moved off a singular value before pricing.
    pub perturbed: bool,
}

/// Call on the continuous geometric average of the price over `[0, T]`.
///
/// `log G` is normal with mean `log S₀ + (r − σ²/2)T/2` and variance `σ²T/3`.
pub fn gac_price(market: &MarketParams, strike: f64) -> Result<f64> {
    market.validate()?;
    if !(strike > 0.0 && strike.is_finite()) {
        return domain(format!("strike must be positive, got {strike}"));
    }
    let t = market.maturity;
    let mean = market.spot.ln() + 0.5 * market.drift_rn() * t;
    let sd = market.vol * (t / 3.0).sqrt();
    Ok((-market.rate * t).exp() * lognormal_call(mean, sd, strike))
}

/// `E[(e^X − K)₊]` for `X ~ N(mean, sd²)`.
pub(crate) fn lognormal_call(mean: f64, sd: f64, strike: f64) -> f64 {
    let d2 = (mean - strike.ln()) / sd;
    let d1 = d2 + sd;
    let forward = (mean + 0.5 * sd * sd).exp();
    (forward * norm_cdf(d1) - strike * norm_cdf(d2)).max(0.0)
}

/// Up-and-out call under continuous monitoring.
///
/// Zero when `K ≥ B`, and zero at `S₀ = B` where the option is knocked out at
/// inception.
pub fn uoc_price(market: &MarketParams, strike: f64, barrier: f64) -> Result<f64> {
    market.validate()?;
    if !(strike > 0.0 && strike.is_finite() && barrier > 0.0 && barrier.is_finite()) {
        return domain(format!("strike and barrier must be positive, got K={strike}, B={barrier}"));
    }
    let x = market.spot;
    if x > barrier {
        return domain(format!("up-and-out call needs spot <= barrier, got S0={x}, B={barrier}"));
    }
    if strike >= barrier || x == barrier {
        return Ok(0.0);
    }
    let r = market.rate;
    let sigma = market.vol;
    let t = market.maturity;
    let sd = sigma * t.sqrt();
    let delta_plus = |s: f64| (s.ln() + (r + 0.5 * sigma * sigma) * t) / sd;
    let delta_minus = |s: f64| (s.ln() + (r - 0.5 * sigma * sigma) * t) / sd;
    let disc = (-r * t).exp();
    let power = -2.0 * r / (sigma * sigma);
    let reflect = barrier * barrier / (strike * x);

    let value = x * (norm_cdf(delta_plus(x / strike)) - norm_cdf(delta_plus(x / barrier)))
        - disc * strike * (norm_cdf(delta_minus(x / strike)) - norm_cdf(delta_minus(x / barrier)))
        - barrier * (x / barrier).powf(power) * (norm_cdf(delta_plus(reflect)) - norm_cdf(delta_plus(barrier / x)))
        + disc
            * strike
            * (x / barrier).powf(power + 1.0)
            * (norm_cdf(delta_minus(reflect)) - norm_cdf(delta_minus(barrier / x)));
    Ok(value.max(0.0))
}

/// Second-order analytical price of the geometric Istanbul call.
pub fn gic_approx(market: &MarketParams, contract: &IstanbulContract) -> Result<ApproxPrice> {
    market.validate()?;
    contract.validate()?;
    let spot = market.spot;
    if spot >= contract.barrier || (contract.barrier / spot).ln() / market.vol < BARRIER_AT_SPOT {
        return Ok(ApproxPrice {
            value: gac_price(market, contract.strike)?,
            regime: PriceRegime::AsianCoincidence,
            coefficients: None,
            perturbed: false,
        });
    }
    let regime = Regime::of(contract);
    let p = derive_params(market, contract, regime)?;
    let (raw, price_regime) = match regime {
        Regime::StrikeAtOrAboveBarrier => {
            (strike_above_barrier(market, contract, &p), PriceRegime::StrikeAtOrAboveBarrier)
        }
        Regime::StrikeBelowBarrier => (
            strike_below_barrier(market, contract, &p) + uoc_price(market, contract.strike, contract.barrier)?,
            PriceRegime::StrikeBelowBarrier,
        ),
    };
    let value = clamp_negative(raw, spot)?;
    Ok(ApproxPrice { value, regime: price_regime, coefficients: Some(p), perturbed: p.perturbed })
}

fn clamp_negative(value: f64, spot: f64) -> Result<f64> {
    if !value.is_finite() {
        return domain(format!("approximation is not finite: {value}"));
    }
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_CLAMP * spot {
        Ok(0.0)
    } else {
        Err(PricingError::NegativePrice(value))
    }
}

fn prefactor(market: &MarketParams, p: &DerivedParams) -> f64 {
    let mu = p.mu;
    let t = market.maturity;
    3f64.sqrt() * p.b / (2.0 * market.vol) * (-3.0 * mu * mu * t / 8.0 + p.b * mu - market.rate * t).exp()
}

fn strike_above_barrier(market: &MarketParams, contract: &IstanbulContract, p: &DerivedParams) -> f64 {
    let z = |i| p.term(i);
    let a = p.log_scale;
    let w = p.slope_coef;
    let barrier_leg =
        z(3).exp() * (z(4) * norm_sf(z(2)) + z(6) * norm_pdf(z(2)) + z(7) * norm_sf(z(2))) + z(5) * norm_sf(z(1));
    let strike_leg = z(9).exp()
        * (z(10) * norm_sf(z(8)) + (z(12) + w / (a * a)) * norm_pdf(z(8)) + z(13) * norm_sf(z(8)))
        + z(11) * norm_sf(z(1));
    prefactor(market, p) * (contract.barrier * barrier_leg - contract.strike * strike_leg)
}

fn strike_below_barrier(market: &MarketParams, contract: &IstanbulContract, p: &DerivedParams) -> f64 {
    let z = |i| p.term(i);
    let a = p.log_scale;
    let h = p.barrier_scale;
    let c = p.barrier_growth;
    let e = p.strike_growth;
    let d = p.quad_coef;
    let log_bk = (contract.barrier / contract.strike).ln();
    let ratio = contract.strike / contract.barrier;

    let reflected_b = z(2) - 2.0 * c / a;
    let barrier_leg = z(3).exp()
        * (z(4) * (norm_cdf(z(2)) - norm_cdf(z(1))) - z(5) * norm_pdf(z(2))
            + (d * log_bk / (c * a) + z(5)) * norm_pdf(z(1))
            + (-2.0 * h * c / a).exp()
                * (-z(6) * norm_sf(reflected_b) - (z(5) + 2.0 * d * h / (c * a * a)) * norm_pdf(reflected_b)))
        + z(7) * norm_sf(z(1) - c / a) * ratio.powf(c);

    let reflected_k = z(9) - 2.0 * e / a;
    let strike_leg = z(10).exp()
        * (z(11) * (norm_cdf(z(9)) - norm_cdf(z(8))) - z(12) * norm_pdf(z(9))
            + (d * log_bk / (e * a) + z(12)) * norm_pdf(z(8))
            + (-2.0 * h * e / a).exp()
                * (-z(13) * norm_sf(reflected_k) - (z(12) + 2.0 * d * h / (e * a * a)) * norm_pdf(reflected_k)))
        + z(14) * norm_sf(z(8) - e / a) * ratio.powf(e);

    prefactor(market, p) * (contract.barrier * barrier_leg - contract.strike * strike_leg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market(spot: f64, t: f64) -> MarketParams {
        MarketParams::new(spot, 0.05, 0.3, t).unwrap()
    }

    fn approx(spot: f64, strike: f64, barrier: f64, t: f64) -> ApproxPrice {
        gic_approx(&market(spot, t), &IstanbulContract::new(strike, barrier).unwrap()).unwrap()
    }

    #[test]
    fn printed_values() {
        for &(s, k, b, t, want) in &[
            (57.0, 63.0, 60.0, 0.5, 1.2886),
            (70.0, 75.0, 75.0, 1.0, 4.1237),
            (55.0, 56.0, 58.0, 0.5, 3.0603),
            (79.0, 81.0, 87.0, 1.5, 8.2147),
        ] {
            let got = approx(s, k, b, t).value;
            assert!((got - want).abs() <= 1e-4 + 1e-12, "({s},{k},{b},{t}): {got} vs {want}");
        }
    }

    #[test]
    fn regimes_dispatch() {
        assert_eq!(approx(57.0, 63.0, 60.0, 1.0).regime, PriceRegime::StrikeAtOrAboveBarrier);
        assert_eq!(approx(57.0, 60.0, 60.0, 1.0).regime, PriceRegime::StrikeAtOrAboveBarrier);
        assert_eq!(approx(57.0, 56.0, 60.0, 1.0).regime, PriceRegime::StrikeBelowBarrier);
        let at = approx(60.0, 56.0, 60.0, 1.0);
        assert_eq!(at.regime, PriceRegime::AsianCoincidence);
        assert_eq!(at.value, gac_price(&market(60.0, 1.0), 56.0).unwrap());
        assert_eq!(approx(65.0, 56.0, 60.0, 1.0).regime, PriceRegime::AsianCoincidence);
    }

    #[test]
    fn gac_limits() {
        let m = MarketParams::new(60.0, 0.05, 1e-8, 1.0).unwrap();
        // deterministic average: exp(log S₀ + drift T/2)
        let avg = 60.0 * (0.5 * m.drift_rn()).exp();
        let want = (-0.05f64).exp() * (avg - 55.0);
        assert!((gac_price(&m, 55.0).unwrap() - want).abs() < 1e-9);
        assert!(gac_price(&m, 65.0).unwrap().abs() < 1e-12);
        assert!(gac_price(&market(60.0, 1.0), 1e6).unwrap() < 1e-12);
    }

    #[test]
    fn uoc_zero_cases() {
        assert_eq!(uoc_price(&market(60.0, 1.0), 64.0, 64.0).unwrap(), 0.0);
        assert_eq!(uoc_price(&market(60.0, 1.0), 70.0, 64.0).unwrap(), 0.0);
        assert_eq!(uoc_price(&market(64.0, 1.0), 60.0, 64.0).unwrap(), 0.0);
        assert!(uoc_price(&market(65.0, 1.0), 60.0, 64.0).is_err());
    }

    #[test]
    fn uoc_far_barrier_is_vanilla() {
        // Black–Scholes call evaluated independently.
        let (s, k, r, v, t): (f64, f64, f64, f64, f64) = (60.0, 62.0, 0.05, 0.3, 1.0);
        let d1 = ((s / k).ln() + (r + 0.5 * v * v) * t) / (v * t.sqrt());
        let d2 = d1 - v * t.sqrt();
        let bs = s * norm_cdf(d1) - k * (-r * t).exp() * norm_cdf(d2);
        let far = uoc_price(&market(60.0, 1.0), 62.0, 1e4).unwrap();
        assert!((far - bs).abs() < 1e-9, "{far} vs {bs}");
    }

    #[test]
    fn negative_clamp() {
        assert_eq!(clamp_negative(-1e-12, 60.0).unwrap(), 0.0);
        assert!(matches!(clamp_negative(-1e-3, 60.0), Err(PricingError::NegativePrice(_))));
        assert_eq!(clamp_negative(0.25, 60.0).unwrap(), 0.25);
    }

    #[test]
    fn barrier_at_spot_limit() {
        let near = approx(60.0, 62.0, 60.0 * (1.0 + 1e-12), 1.0);
        assert_eq!(near.regime, PriceRegime::AsianCoincidence);
    }

    #[test]
    fn singular_drift_is_flagged() {
        let m = MarketParams::new(60.0, 0.045, 0.3, 1.0).unwrap();
        let p = gic_approx(&m, &IstanbulContract::new(63.0, 64.0).unwrap()).unwrap();
        assert!(p.perturbed);
        assert!(p.value.is_finite() && p.value > 0.0);
    }
}
