//! Standard-normal functions, closed-form Gaussian integral identities and the
//! second-order kernel used by the analytical pricer.
//!
//! The time kernel at the heart of the joint density of the geometric average is
//!
//! ```text
//! I(α, β, γ, T) = ∫₀ᵀ (T−t)^(−1/2) t^(−3/2) exp(−α²/(2(T−t)) − βt − γ/t) dt
//! ```
//!
//! It has no closed form for β ≠ 0. Expanding `exp(−βt)` to second order gives
//! `I ≈ A − Bβ + Cβ²/2` where `A`, `B` and `C` are the moment integrals of
//! orders 0, 1 and 2 in `t`, all of which do have closed forms.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934_381_87;

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function.
///
/// Evaluated through `erfc` so the lower tail keeps full relative precision.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 − Φ(x)` without cancellation.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Density and distribution function of the standard normal at `x`.
pub fn std_normal(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return domain(format!("standard normal evaluated at non-finite {x}"));
    }
    Ok((norm_pdf(x), norm_cdf(x)))
}

/// Arguments of the time kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelArgs {
    /// Log-distance scale, `α ≥ 0`.
    pub alpha: f64,
    /// Expansion variable; accuracy degrades as `O(β³)` but any value is accepted.
    pub beta: f64,
    /// Inverse-time weight, `γ > 0`.
    pub gamma: f64,
    /// Horizon `T > 0` in years.
    pub horizon: f64,
}

impl KernelArgs {
    pub fn new(alpha: f64, beta: f64, gamma: f64, horizon: f64) -> Result<Self> {
        let args = Self { alpha, beta, gamma, horizon };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        validate_abc(self.alpha, self.gamma, self.horizon)?;
        if !self.beta.is_finite() {
            return domain(format!("kernel beta must be finite, got {}", self.beta));
        }
        Ok(())
    }

    /// `d = (α + √(2γ)) / √T`, the argument shared by every closed form.
    pub fn d(&self) -> f64 {
        (self.alpha + (2.0 * self.gamma).sqrt()) / self.horizon.sqrt()
    }
}

fn validate_abc(alpha: f64, gamma: f64, horizon: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return domain(format!("kernel alpha must be finite and >= 0, got {alpha}"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return domain(format!("kernel gamma must be finite and > 0, got {gamma}"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return domain(format!("kernel horizon must be finite and > 0, got {horizon}"));
    }
    Ok(())
}

/// The three moment integrals of the time kernel at `β = 0`.
///
/// These are returned un-normalised, i.e. without the `1/π` that the kernel
/// itself carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcIntegrals {
    /// `∫₀ᵀ (T−t)^(−1/2) t^(−3/2) e^(−α²/(2(T−t)) − γ/t) dt`
    pub a: f64,
    /// Same integrand times `t`.
    pub b: f64,
    /// Same integrand times `t²`.
    pub c: f64,
}

/// Closed forms of the kernel moments `A(α,γ,T)`, `B(α,γ,T)`, `C(α,γ,T)`.
pub fn abc_integrals(alpha: f64, gamma: f64, horizon: f64) -> Result<AbcIntegrals> {
    validate_abc(alpha, gamma, horizon)?;
    let sqrt_t = horizon.sqrt();
    let root = (2.0 * gamma).sqrt();
    let d = (alpha + root) / sqrt_t;
    let pdf = norm_pdf(d);
    let tail = norm_sf(d);

    let a = PI * (2.0 / (horizon * gamma)).sqrt() * pdf;
    let b = 2.0 * PI * tail;
    // (2γ − α² − T)Φ(d) − 2γ + T + α² rewritten on the upper tail.
    let c = PI * ((alpha * alpha - 2.0 * gamma + horizon) * tail + sqrt_t * (root - alpha) * pdf);
    Ok(AbcIntegrals { a, b, c })
}

/// Second-order approximation of `(1/π)·I(α, β, γ, T)`.
///
/// Returns `(A − Bβ + Cβ²/2)/π`: the kernel carries the `1/π` normalisation,
/// unlike [`abc_integrals`].
pub fn lemma1_kernel(args: &KernelArgs) -> Result<f64> {
    args.validate()?;
    let m = abc_integrals(args.alpha, args.gamma, args.horizon)?;
    let beta = args.beta;
    Ok((m.a - m.b * beta + 0.5 * m.c * beta * beta) / PI)
}

/// Indefinite Gaussian integrals with closed-form antiderivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianIntegral {
    /// `∫ x^(−3/2) exp(−ax − h/(2x)) dx`, requires `a ≥ 0`, `h > 0`, `x > 0`.
    A1 { a: f64, h: f64 },
    /// `∫ Φ(ax + h) dx`, requires `a ≠ 0`.
    A2 { a: f64, h: f64 },
    /// `∫ e^(cx) (dx² + k)(1 − Φ(ax + h)) dx`, requires `a, c ≠ 0`.
    A3 { a: f64, c: f64, d: f64, k: f64, h: f64 },
    /// `∫ e^(cx) (wx + l) φ(ax + h) dx`, requires `a ≠ 0`.
    A4 { a: f64, c: f64, h: f64, w: f64, l: f64 },
}

impl GaussianIntegral {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::A1 { a, h } if !(a >= 0.0 && h > 0.0) => {
                domain(format!("A1 needs a >= 0 and h > 0, got a={a}, h={h}"))
            }
            Self::A2 { a, .. } | Self::A4 { a, .. } if a == 0.0 => domain("coefficient a must be non-zero"),
            Self::A3 { a, c, .. } if a == 0.0 || c == 0.0 => {
                domain(format!("A3 needs a, c non-zero, got a={a}, c={c}"))
            }
            _ => Ok(()),
        }
    }

    /// The integrand at `x`.
    pub fn integrand(&self, x: f64) -> f64 {
        match *self {
            Self::A1 { a, h } => x.powf(-1.5) * (-a * x - h / (2.0 * x)).exp(),
            Self::A2 { a, h } => norm_cdf(a * x + h),
            Self::A3 { a, c, d, k, h } => (c * x).exp() * (d * x * x + k) * norm_sf(a * x + h),
            Self::A4 { a, c, h, w, l } => (c * x).exp() * (w * x + l) * norm_pdf(a * x + h),
        }
    }

    /// The closed-form antiderivative at `x`.
    pub fn antiderivative(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if !x.is_finite() {
            return domain(format!("antiderivative evaluated at non-finite {x}"));
        }
        Ok(match *self {
            Self::A1 { a, h } => {
                if x <= 0.0 {
                    return domain(format!("A1 is defined for x > 0, got {x}"));
                }
                let s = (2.0 * a * h).sqrt();
                let u = (2.0 * a * x).sqrt();
                let v = (h / x).sqrt();
                (2.0 * PI / h).sqrt() * ((-s).exp() * norm_cdf(u - v) + s.exp() * norm_cdf(-u - v))
            }
            Self::A2 { a, h } => {
                let y = a * x + h;
                (x + h / a) * norm_cdf(y) + norm_pdf(y) / a
            }
            Self::A3 { a, c, d, k, h } => {
                let y = a * x + h;
                let shifted = y - c / a;
                let scale = (c * c / (2.0 * a * a) - h * c / a).exp();
                let poly = d / c * x * x - 2.0 * d / (c * c) * x + 2.0 * d / c.powi(3) + k / c;
                let cdf_coef = 2.0 * h * d / a.powi(3) + d * (1.0 - h * h) / (c * a * a)
                    - 2.0 * d / c.powi(3)
                    - 2.0 * h * d / (c * c * a)
                    - d * c / a.powi(4)
                    - k / c;
                let pdf_coef = d / (c * a) * x - 2.0 * d / (c * c * a) - h * d / (c * a * a) + d / a.powi(3);
                poly * norm_sf(y) * (c * x).exp()
                    - scale * cdf_coef * norm_cdf(shifted)
                    - scale * pdf_coef * norm_pdf(shifted)
            }
            Self::A4 { a, c, h, w, l } => {
                let shifted = a * x + h - c / a;
                let scale = (c * c / (2.0 * a * a) - h * c / a).exp();
                let cdf_coef = w * c / a.powi(3) - w * h / (a * a) + l / a;
                scale * (cdf_coef * norm_cdf(shifted) - w / (a * a) * norm_pdf(shifted))
            }
        })
    }
}

/// Right-hand side of the definite integral
/// `∫₀ᵀ (T−t)^(−1/2) t^(−1/2) exp(−α²/(2(T−t))) dt = 2π(1 − Φ(α/√T))`.
pub fn arcsine_tail_integral(alpha: f64, horizon: f64) -> Result<f64> {
    check_alpha_horizon(alpha, horizon)?;
    Ok(2.0 * PI * norm_sf(alpha / horizon.sqrt()))
}

/// Right-hand side of the definite integral
/// `∫₀ᵀ t^(1/2) (T−t)^(−1/2) exp(−α²T/(2t(T−t))) dt = Tπ(1 − Φ(2α/√T))`.
pub fn arcsine_bridge_integral(alpha: f64, horizon: f64) -> Result<f64> {
    check_alpha_horizon(alpha, horizon)?;
    Ok(horizon * PI * norm_sf(2.0 * alpha / horizon.sqrt()))
}

fn check_alpha_horizon(alpha: f64, horizon: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite() && horizon > 0.0 && horizon.is_finite()) {
        return domain(format!("need alpha >= 0 and horizon > 0, got alpha={alpha}, horizon={horizon}"));
    }
    Ok(())
}
