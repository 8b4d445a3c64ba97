//! Adaptive Gauss–Kronrod integration and the semi-analytical reference pricer.
//!
//! The reference price integrates the exact joint density of the geometric
//! average on `{τ < T}` against the call payoff. It shares no algebra with the
//! closed-form expansion and serves as the oracle for it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::closed_form::uoc_price;
use crate::error::{domain, PricingError, Result};
use crate::model::{joint_density_log, IstanbulContract, MarketParams};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod21<F: Fn(f64) -> f64 + ?Sized>(f: &F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = (fc * WGK[10]).abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return domain(format!("integrand not finite on [{lo}, {hi}]"));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { lo, hi, value, error })
}

/// Globally adaptive bisection driven by the segment with the largest error.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, max_subdivisions: 2000 }
    }

    /// Integrate over `[lo, hi]`; either bound may be infinite.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<QuadratureResult> {
        self.integrate_with_breaks(f, &[lo, hi])
    }

    /// Integrate over consecutive intervals delimited by `points`, which must be
    /// strictly increasing. Interior points mark kinks or sharp features.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<QuadratureResult> {
        self.with_breaks(&f, points)
    }

    fn with_breaks(&self, f: &dyn Fn(f64) -> f64, points: &[f64]) -> Result<QuadratureResult> {
        if points.len() < 2
            || points.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
            || points.iter().any(|p| p.is_nan())
        {
            return domain(format!("integration limits must be strictly increasing, got {points:?}"));
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return domain("integration tolerances must be non-negative and not both zero");
        }
        let lo = points[0];
        let hi = points[points.len() - 1];
        let interior = &points[1..points.len() - 1];
        if interior.iter().any(|p| p.is_infinite()) {
            return domain("interior break points must be finite");
        }
        match (lo.is_infinite(), hi.is_infinite()) {
            (false, false) => self.adapt(f, points),
            (false, true) => {
                // x = lo + u/(1−u)
                let g = |u: f64| {
                    let v = 1.0 - u;
                    f(lo + u / v) / (v * v)
                };
                let mapped: Vec<f64> = points[..points.len() - 1]
                    .iter()
                    .map(|&x| (x - lo) / (1.0 + x - lo))
                    .chain(std::iter::once(1.0))
                    .collect();
                self.adapt(&g, &mapped)
            }
            (true, false) => {
                // x = hi − u/(1−u), reversed so the mapped points increase
                let g = |u: f64| {
                    let v = 1.0 - u;
                    f(hi - u / v) / (v * v)
                };
                let mapped: Vec<f64> =
                    points[1..].iter().rev().map(|&x| (hi - x) / (1.0 + hi - x)).chain(std::iter::once(1.0)).collect();
                self.adapt(&g, &mapped)
            }
            (true, true) => {
                let mut split = vec![f64::NEG_INFINITY];
                if interior.is_empty() {
                    split.push(0.0);
                } else {
                    split.extend_from_slice(interior);
                }
                let left = self.with_breaks(f, &split[..2])?;
                let mut rest = split[1..].to_vec();
                rest.push(f64::INFINITY);
                let right = self.with_breaks(f, &rest)?;
                Ok(QuadratureResult {
                    value: left.value + right.value,
                    abs_error_estimate: left.abs_error_estimate + right.abs_error_estimate,
                    evaluations: left.evaluations + right.evaluations,
                })
            }
        }
    }

    fn adapt<F: Fn(f64) -> f64 + ?Sized>(&self, f: &F, points: &[f64]) -> Result<QuadratureResult> {
        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            heap.push(kronrod21(f, w[0], w[1])?);
            evaluations += 21;
        }
        let mut subdivisions = heap.len();
        loop {
            let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target {
                return Ok(QuadratureResult { value, abs_error_estimate: error, evaluations });
            }
            let worst = heap.pop().expect("at least one segment");
            let mid = 0.5 * (worst.lo + worst.hi);
            let exhausted = subdivisions >= self.max_subdivisions;
            if exhausted || !(worst.lo < mid && mid < worst.hi) {
                heap.push(worst);
                return Err(PricingError::Accuracy { estimate: value, error_bound: error });
            }
            heap.push(kronrod21(f, worst.lo, mid)?);
            heap.push(kronrod21(f, mid, worst.hi)?);
            evaluations += 42;
            subdivisions += 1;
        }
    }
}

/// Adaptive integral of `f` over `[lo, hi]` with error `≤ max(abs_tol, rel_tol·|value|)`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadratureResult> {
    Integrator::new(abs_tol, rel_tol).integrate(f, lo, hi)
}

/// Power of `t` multiplying the time kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMoment {
    Zeroth,
    First,
    Second,
}

impl TimeMoment {
    fn power(self) -> i32 {
        match self {
            Self::Zeroth => 0,
            Self::First => 1,
            Self::Second => 2,
        }
    }
}

/// Exponent below which `exp` is treated as exactly zero.
pub(crate) const UNDERFLOW_EXPONENT: f64 = 700.0;

/// `∫₀ᵀ tᵐ (T−t)^(−1/2) t^(−3/2) exp(−α²/(2(T−t)) − βt − γ/t) dt` by direct quadrature.
///
/// The substitution `t = T sin²θ` removes both endpoint singularities; the
/// region where `γ/t > 700` contributes nothing representable and is skipped.
pub fn time_kernel_integral(
    alpha: f64,
    beta: f64,
    gamma: f64,
    horizon: f64,
    moment: TimeMoment,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    if !(alpha >= 0.0 && alpha.is_finite() && beta.is_finite() && gamma >= 0.0 && gamma.is_finite()) {
        return domain(format!("time kernel needs alpha >= 0, gamma >= 0, got alpha={alpha}, gamma={gamma}"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return domain(format!("time kernel horizon must be > 0, got {horizon}"));
    }
    if gamma == 0.0 && moment == TimeMoment::Zeroth {
        return domain("zeroth time moment diverges at gamma = 0");
    }
    let power = moment.power();
    let theta_lo = if gamma > 0.0 {
        let t_cut = gamma / UNDERFLOW_EXPONENT;
        if t_cut >= horizon {
            return Ok(QuadratureResult { value: 0.0, abs_error_estimate: 0.0, evaluations: 0 });
        }
        (t_cut / horizon).sqrt().asin()
    } else {
        0.0
    };
    let half_alpha_sq = 0.5 * alpha * alpha;
    let scale = 2.0 * horizon.powi(power - 1);
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let t = horizon * s * s;
        let rest = horizon * c * c;
        let mut exponent = -beta * t;
        if half_alpha_sq > 0.0 {
            exponent -= half_alpha_sq / rest;
        }
        if gamma > 0.0 {
            exponent -= gamma / t;
        }
        if exponent < -745.0 {
            return 0.0;
        }
        scale * (s * s).powi(power - 1) * exponent.exp()
    };
    Integrator::new(0.0, rel_tol).integrate(integrand, theta_lo, FRAC_PI_2)
}

/// Reference price of the geometric Istanbul call by nested quadrature of the
/// exact joint density.
///
/// The outer integral runs over `z = log(x/B)` from `log(K/B)` to the point
/// where `3z²/(2Tσ²) > 40`; the inner time integrals run at `rel_tol/10`.
/// For `K < B` the up-and-out call is added in closed form.
pub fn gic_quadrature(market: &MarketParams, contract: &IstanbulContract, rel_tol: f64) -> Result<QuadratureResult> {
    market.validate()?;
    contract.validate()?;
    if !(1e-8..1.0).contains(&rel_tol) {
        return domain(format!("reference pricer needs 1e-8 <= rel_tol < 1, got {rel_tol}"));
    }
    if contract.barrier <= market.spot {
        return Err(PricingError::Regime { spot: market.spot, barrier: contract.barrier });
    }
    let strike = contract.strike;
    let barrier = contract.barrier;
    let inner_tol = rel_tol / 10.0;
    let z_lo = (strike / barrier).ln();
    let z_tail = (40.0 * 2.0 * market.maturity / 3.0).sqrt() * market.vol;
    let z_hi = z_tail.max(z_lo + z_tail);
    let discount = (-market.rate * market.maturity).exp();

    let integrand = |z: f64| -> f64 {
        match joint_density_log(z, market, barrier, inner_tol) {
            Ok(density) => (barrier * z.exp() - strike) * density,
            Err(_) => f64::NAN,
        }
    };
    let mut points = vec![z_lo];
    if z_lo < 0.0 {
        // |z| kink of the density at the barrier level
        points.push(0.0);
    }
    points.push(z_hi);
    let outer = Integrator::new(0.0, rel_tol).integrate_with_breaks(integrand, &points)?;
    let knock_out = uoc_price(market, strike, barrier)?;
    Ok(QuadratureResult {
        value: discount * outer.value + knock_out,
        abs_error_estimate: discount * outer.abs_error_estimate,
        evaluations: outer.evaluations,
    })
}
