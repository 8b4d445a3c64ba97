//! Market and contract data, derived coefficients, the first-hitting-time
//! density and the exact joint law of the geometric average on `{τ < T}`.

use std::f64::consts::PI;

use crate::error::{domain, PricingError, Result};
use crate::math_kernel::norm_cdf;
use crate::quadrature::{time_kernel_integral, Integrator, TimeMoment, UNDERFLOW_EXPONENT};

/// Black–Scholes market: `S_t = S₀ exp((r − σ²/2)t + σW_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    pub spot: f64,
    pub rate: f64,
    pub vol: f64,
    pub maturity: f64,
}

impl MarketParams {
    pub fn new(spot: f64, rate: f64, vol: f64, maturity: f64) -> Result<Self> {
        let m = Self { spot, rate, vol, maturity };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.spot) {
            return domain(format!("spot must be positive, got {}", self.spot));
        }
        if !self.rate.is_finite() {
            return domain(format!("rate must be finite, got {}", self.rate));
        }
        if !positive(self.vol) {
            return domain(format!("volatility must be positive, got {}", self.vol));
        }
        if !positive(self.maturity) {
            return domain(format!("maturity must be positive, got {}", self.maturity));
        }
        Ok(())
    }

    /// Risk-neutral log drift `r − σ²/2`.
    pub fn drift_rn(&self) -> f64 {
        self.rate - 0.5 * self.vol * self.vol
    }

    /// Log drift in volatility units, `(r − σ²/2)/σ`.
    pub fn scaled_drift(&self) -> f64 {
        self.drift_rn() / self.vol
    }

    pub fn with_spot(&self, spot: f64) -> Self {
        Self { spot, ..*self }
    }
}

/// Fixed-strike call whose averaging starts when the price first reaches an
/// up-barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IstanbulContract {
    pub strike: f64,
    pub barrier: f64,
}

impl IstanbulContract {
    pub fn new(strike: f64, barrier: f64) -> Result<Self> {
        let c = Self { strike, barrier };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return domain(format!("strike must be positive, got {}", self.strike));
        }
        if !(self.barrier > 0.0 && self.barrier.is_finite()) {
            return domain(format!("barrier must be positive, got {}", self.barrier));
        }
        Ok(())
    }
}

/// Which closed-form branch applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `K ≥ B`: averaging always starts below the strike.
    StrikeAtOrAboveBarrier,
    /// `K < B`: the up-and-out call contributes.
    StrikeBelowBarrier,
}

impl Regime {
    pub fn of(contract: &IstanbulContract) -> Self {
        if contract.strike >= contract.barrier {
            Self::StrikeAtOrAboveBarrier
        } else {
            Self::StrikeBelowBarrier
        }
    }
}

/// Magnitude below which the exponents of the two payoff legs are treated as
/// singular.
pub const SINGULARITY_EPS: f64 = 1e-6;

/// Coefficients of the closed-form approximation.
///
/// Everything the two branches need is computed here, once. `terms[i]` holds
/// the `(i+1)`-th coefficient of the branch selected by `regime`; the
/// `K ≥ B` branch uses thirteen of them and leaves the last at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub regime: Regime,
    /// `r − σ²/2`.
    pub drift_rn: f64,
    /// Drift in volatility units, possibly nudged off a singularity.
    pub mu: f64,
    /// `log(B/S₀)/σ`.
    pub b: f64,
    /// `√3/(σ√T)`: slope of the normal argument in `z = log(x/B)`.
    pub log_scale: f64,
    /// `|b|/√T`: offset of the normal argument.
    pub barrier_scale: f64,
    /// `3μ/(2σ) + 1`: growth rate of the barrier leg in `z`.
    pub barrier_growth: f64,
    /// `3μ/(2σ)`: growth rate of the strike leg in `z`.
    pub strike_growth: f64,
    /// `3μ⁴/(128σ²)`: quadratic coefficient of the tail-probability term.
    pub quad_coef: f64,
    /// `(T − b²)μ⁴/128 − μ²/4`: constant coefficient of the tail-probability term.
    pub const_coef: f64,
    /// `−μ⁴√(3T)/(128σ)`: slope of the density term.
    pub slope_coef: f64,
    /// `2/(Th) + Tμ⁴h/128`: level of the density term.
    pub level_coef: f64,
    pub terms: [f64; 14],
    /// Set when `mu` was moved to keep both growth rates away from zero.
    pub perturbed: bool,
}

impl DerivedParams {
    /// One-based access matching the usual numbering of the coefficients.
    pub fn term(&self, index: usize) -> f64 {
        self.terms[index - 1]
    }
}

/// Guard the two growth rates away from zero by moving `μ`.
///
/// Returns the possibly perturbed drift and whether it moved.
pub fn guard_singularity(mu: f64, vol: f64) -> (f64, bool) {
    let ratio = 2.0 * vol / 3.0;
    let strike_growth = mu / ratio;
    if strike_growth.abs() <= SINGULARITY_EPS {
        let sign = if strike_growth < 0.0 { -1.0 } else { 1.0 };
        return (sign * SINGULARITY_EPS * ratio, true);
    }
    let barrier_growth = strike_growth + 1.0;
    if barrier_growth.abs() <= SINGULARITY_EPS {
        let sign = if barrier_growth < 0.0 { -1.0 } else { 1.0 };
        return ((sign * SINGULARITY_EPS - 1.0) * ratio, true);
    }
    (mu, false)
}

/// Coefficients of the closed-form price for `B > S₀`.
pub fn derive_params(market: &MarketParams, contract: &IstanbulContract, regime: Regime) -> Result<DerivedParams> {
    market.validate()?;
    contract.validate()?;
    if contract.barrier <= market.spot {
        return Err(PricingError::Regime { spot: market.spot, barrier: contract.barrier });
    }
    let (mu, perturbed) = guard_singularity(market.scaled_drift(), market.vol);
    let mut p = coefficients(market, contract, regime, mu);
    p.perturbed = perturbed;
    Ok(p)
}

fn coefficients(market: &MarketParams, contract: &IstanbulContract, regime: Regime, mu: f64) -> DerivedParams {
    let sigma = market.vol;
    let t = market.maturity;
    let b = (contract.barrier / market.spot).ln() / sigma;
    let mu2 = mu * mu;
    let mu4 = mu2 * mu2;

    let a = 3f64.sqrt() / (sigma * t.sqrt());
    let h = b.abs() / t.sqrt();
    let c = 3.0 * mu / (2.0 * sigma) + 1.0;
    let e = c - 1.0;
    let d = 3.0 * mu4 / (128.0 * sigma * sigma);
    let k = (t - b * b) * mu4 / 128.0 - mu2 / 4.0;
    let l = 2.0 / (t * h) + t * mu4 * h / 128.0;
    let w = -mu4 * (3.0 * t).sqrt() / (128.0 * sigma);

    let ratio = contract.strike / contract.barrier;
    let lk = ratio.ln();
    let mut z = [0.0; 14];
    match regime {
        Regime::StrikeAtOrAboveBarrier => {
            z[0] = a * lk + h;
            z[1] = z[0] - c / a;
            z[2] = c * c / (2.0 * a * a) - h * c / a;
            z[3] = -2.0 * d * h / a.powi(3) - d * (1.0 - h * h) / (c * a * a)
                + 2.0 * d / c.powi(3)
                + 2.0 * d * h / (a * c * c)
                + d * c / a.powi(4)
                + k / c;
            z[4] = ratio.powf(c) * (-d * lk * lk / c + 2.0 * d * lk / (c * c) - 2.0 * d / c.powi(3) - k / c);
            z[5] = d * lk / (a * c) - 2.0 * d / (a * c * c) - d * h / (c * a * a) + d / a.powi(3) + w / (a * a);
            z[6] = w * c / a.powi(3) - w * h / (a * a) + l / a;
            z[7] = z[0] - e / a;
            z[8] = e * e / (2.0 * a * a) - h * e / a;
            z[9] = -2.0 * d * h / a.powi(3) - d * (1.0 - h * h) / (e * a * a)
                + 2.0 * d / e.powi(3)
                + 2.0 * d * h / (a * e * e)
                + d * e / a.powi(4)
                + k / e;
            z[10] = ratio.powf(e) * (-d * lk * lk / e + 2.0 * d * lk / (e * e) - 2.0 * d / e.powi(3) - k / e);
            z[11] = d * lk / (a * e) - 2.0 * d / (a * e * e) - d * h / (e * a * a) + d / a.powi(3);
            z[12] = w * e / a.powi(3) - w * h / (a * a) + l / a;
        }
        Regime::StrikeBelowBarrier => {
            let lb = -lk;
            z[0] = a * lb + h + c / a;
            z[1] = z[0] - a * lb;
            z[2] = c * c / (2.0 * a * a) + h * c / a;
            z[3] = 2.0 * d * h / a.powi(3) - d * (1.0 - h * h) / (c * a * a) + 2.0 * d / c.powi(3)
                - 2.0 * d * h / (a * c * c)
                + d * c / a.powi(4)
                + k / c
                + w * c / a.powi(3)
                + w * h / (a * a)
                - l / a;
            z[4] = 2.0 * d / (a * c * c) - d * h / (c * a * a) - d / a.powi(3) - w / (a * a);
            z[5] = 2.0 * (2.0 * h * d / a.powi(3) - 2.0 * h * d / (c * c * a) + w * h / (a * a) - l / a) - z[3];
            z[6] = -d / c * lk * lk + 2.0 * d / (c * c) * lk - 2.0 * d / c.powi(3) - k / c;
            z[7] = a * lb + h + e / a;
            z[8] = z[7] - a * lb;
            z[9] = e * e / (2.0 * a * a) + h * e / a;
            z[10] = 2.0 * d * h / a.powi(3) - d * (1.0 - h * h) / (e * a * a) + 2.0 * d / e.powi(3)
                - 2.0 * d * h / (a * e * e)
                + d * e / a.powi(4)
                + k / e
                + w * e / a.powi(3)
                + w * h / (a * a)
                - l / a;
            z[11] = 2.0 * d / (a * e * e) - d * h / (e * a * a) - d / a.powi(3) - w / (a * a);
            z[12] = 2.0 * (2.0 * h * d / a.powi(3) - 2.0 * h * d / (e * e * a) + w * h / (a * a) - l / a) - z[10];
            z[13] = -d / e * lk * lk + 2.0 * d / (e * e) * lk - 2.0 * d / e.powi(3) - k / e;
        }
    }

    DerivedParams {
        regime,
        drift_rn: market.drift_rn(),
        mu,
        b,
        log_scale: a,
        barrier_scale: h,
        barrier_growth: c,
        strike_growth: e,
        quad_coef: d,
        const_coef: k,
        slope_coef: w,
        level_coef: l,
        terms: z,
        perturbed: false,
    }
}

fn barrier_distance(market: &MarketParams, barrier: f64) -> Result<f64> {
    market.validate()?;
    if !(barrier > market.spot && barrier.is_finite()) {
        return Err(PricingError::Regime { spot: market.spot, barrier });
    }
    Ok((barrier / market.spot).ln() / market.vol)
}

/// Density of the first time the price reaches `barrier > spot`:
/// `h(t) = b/√(2πt³) · exp(−(b − μt)²/(2t))`.
pub fn hitting_density(t: f64, market: &MarketParams, barrier: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("hitting time must be positive, got {t}"));
    }
    let b = barrier_distance(market, barrier)?;
    Ok(hitting_density_unchecked(t, b, market.scaled_drift()))
}

#[inline]
fn hitting_density_unchecked(t: f64, b: f64, mu: f64) -> f64 {
    let gap = b - mu * t;
    let exponent = -gap * gap / (2.0 * t);
    if exponent < -745.0 {
        return 0.0;
    }
    b / (2.0 * PI * t * t * t).sqrt() * exponent.exp()
}

/// Evaluation mode of [`joint_law_gt`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawMode {
    /// `P(G_T ≤ x, τ < T)`.
    Cdf,
    /// Its derivative in `x`.
    Pdf,
}

const CDF_ABS_TOL: f64 = 1e-10;
const CDF_REL_TOL: f64 = 1e-8;
const PDF_REL_TOL: f64 = 1e-10;

/// Exact law of the geometric average restricted to paths that reach the
/// barrier before maturity.
pub fn joint_law_gt(x: f64, market: &MarketParams, contract: &IstanbulContract, mode: LawMode) -> Result<f64> {
    contract.validate()?;
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("joint law evaluated at non-positive level {x}"));
    }
    let z = (x / contract.barrier).ln();
    match mode {
        LawMode::Cdf => joint_cdf_log(z, market, contract.barrier),
        LawMode::Pdf => Ok(joint_density_log(z, market, contract.barrier, PDF_REL_TOL)? / x),
    }
}

fn joint_cdf_log(z: f64, market: &MarketParams, barrier: f64) -> Result<f64> {
    let b = barrier_distance(market, barrier)?;
    let mu = market.scaled_drift();
    let t_end = market.maturity;
    let t_cut = b * b / (2.0 * UNDERFLOW_EXPONENT);
    if t_cut >= t_end {
        return Ok(0.0);
    }
    let drift = market.drift_rn();
    let sigma = market.vol;
    let integrand = |t: f64| {
        let rest = t_end - t;
        let level = if rest > 0.0 {
            norm_cdf(3f64.sqrt() * (z - 0.5 * drift * rest) / (sigma * rest.sqrt()))
        } else if z >= 0.0 {
            1.0
        } else {
            0.0
        };
        level * hitting_density_unchecked(t, b, mu)
    };
    Ok(Integrator::new(CDF_ABS_TOL, CDF_REL_TOL).integrate(integrand, t_cut, t_end)?.value)
}

/// Density of `log(G_T/B)` on `{τ < T}` at `z`.
///
/// The time integral inside is evaluated by adaptive quadrature at `rel_tol`.
pub fn joint_density_log(z: f64, market: &MarketParams, barrier: f64, rel_tol: f64) -> Result<f64> {
    let b = barrier_distance(market, barrier)?;
    if !z.is_finite() {
        return domain(format!("log level must be finite, got {z}"));
    }
    let sigma = market.vol;
    let t = market.maturity;
    let mu = market.scaled_drift();
    let prefactor_exp = 3.0 * mu * z / (2.0 * sigma) - 3.0 * mu * mu * t / 8.0 + b * mu;
    let prefactor = 3f64.sqrt() * b / (2.0 * PI * sigma) * prefactor_exp.exp();
    let alpha = 3f64.sqrt() * z.abs() / sigma;
    let inner = time_kernel_integral(alpha, mu * mu / 8.0, b * b / 2.0, t, TimeMoment::Zeroth, rel_tol)?;
    Ok(prefactor * inner.value)
}
