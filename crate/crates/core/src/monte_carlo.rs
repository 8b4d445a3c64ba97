//! Path simulation on a uniform grid and crude / control-variate estimators.
//!
//! Each path draws from its own ChaCha stream keyed by `(seed, path index)`,
//! so a path is the same whichever thread simulates it and however many
//! other paths are drawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::closed_form::gac_price;
use crate::error::{domain, Result};
use crate::exec::Execution;
use crate::model::{IstanbulContract, MarketParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Number of time steps `n`; the grid has `n + 1` points.
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    /// Use the geometric Asian call as a control variate.
    pub use_cv: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { steps: 2500, paths: 10_000, seed: 42, use_cv: true }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return domain(format!("need at least 2 time steps, got {}", self.steps));
        }
        if self.paths < 2 {
            return domain(format!("need at least 2 paths, got {}", self.paths));
        }
        Ok(())
    }
}

/// One simulated trajectory `S_{t_0}, …, S_{t_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Deterministic generator of price paths.
#[derive(Debug, Clone)]
pub struct PathSimulator {
    config: SimConfig,
    market: MarketParams,
    drift_step: f64,
    vol_step: f64,
}

impl PathSimulator {
    pub fn new(config: SimConfig, market: MarketParams) -> Result<Self> {
        config.validate()?;
        market.validate()?;
        let dt = market.maturity / config.steps as f64;
        Ok(Self { config, market, drift_step: market.drift_rn() * dt, vol_step: market.vol * dt.sqrt() })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn dt(&self) -> f64 {
        self.market.maturity / self.config.steps as f64
    }

    /// Write `log S_{t_i}` for path `index` into `logs` (length `steps + 1`).
    pub(crate) fn fill_log_path(&self, index: u64, logs: &mut [f64]) {
        debug_assert_eq!(logs.len(), self.config.steps + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index);
        let mut x = self.market.spot.ln();
        logs[0] = x;
        for slot in logs[1..].iter_mut() {
            let y: f64 = rng.sample(StandardNormal);
            x += self.drift_step + self.vol_step * y;
            *slot = x;
        }
    }

    pub fn path(&self, index: u64) -> PathGrid {
        let n = self.config.steps;
        let mut logs = vec![0.0; n + 1];
        self.fill_log_path(index, &mut logs);
        let dt = self.dt();
        let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        times[n] = self.market.maturity;
        let mut values: Vec<f64> = logs.iter().map(|x| x.exp()).collect();
        values[0] = self.market.spot;
        PathGrid { times, values }
    }

    /// All configured paths in index order.
    pub fn paths(&self) -> impl Iterator<Item = PathGrid> + '_ {
        (0..self.config.paths as u64).map(move |i| self.path(i))
    }
}

/// Stream of `config.paths` simulated paths.
pub fn simulate_paths(config: SimConfig, market: MarketParams) -> Result<impl Iterator<Item = PathGrid>> {
    let sim = PathSimulator::new(config, market)?;
    Ok((0..config.paths as u64).map(move |i| sim.path(i)))
}

/// Payoff evaluated on a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffKind {
    /// Geometric Istanbul call.
    Gic,
    /// Geometric Asian call over the whole grid.
    Gac,
    /// Arithmetic Istanbul call.
    Aic,
    /// Up-and-out call with grid monitoring.
    Uoc,
}

/// First grid index in `0..n` at or above the barrier. A crossing at the final
/// point leaves no averaging window and counts as no hit.
fn first_hit(logs: &[f64], log_barrier: f64) -> Option<usize> {
    logs[..logs.len() - 1].iter().position(|&x| x >= log_barrier)
}

/// Trapezoid mean of `log S` over grid points `start..=n`.
fn log_window_mean(logs: &[f64], start: usize) -> f64 {
    let n = logs.len() - 1;
    let sum: f64 = logs[start..].windows(2).map(|w| w[0] + w[1]).sum();
    sum / (2.0 * (n - start) as f64)
}

fn arith_window_mean(logs: &[f64], start: usize) -> f64 {
    let n = logs.len() - 1;
    let mut prev = logs[start].exp();
    let mut sum = 0.0;
    for &x in &logs[start + 1..] {
        let next = x.exp();
        sum += prev + next;
        prev = next;
    }
    sum / (2.0 * (n - start) as f64)
}

fn payoff_from_logs(logs: &[f64], contract: &IstanbulContract, kind: PayoffKind) -> f64 {
    let strike = contract.strike;
    let terminal = logs[logs.len() - 1].exp();
    let log_barrier = contract.barrier.ln();
    let avg = match kind {
        PayoffKind::Gac => log_window_mean(logs, 0).exp(),
        PayoffKind::Gic => match first_hit(logs, log_barrier) {
            Some(i) => log_window_mean(logs, i).exp(),
            None => terminal,
        },
        PayoffKind::Aic => match first_hit(logs, log_barrier) {
            Some(i) => arith_window_mean(logs, i),
            None => terminal,
        },
        PayoffKind::Uoc => {
            if logs.iter().any(|&x| x >= log_barrier) {
                return 0.0;
            }
            terminal
        }
    };
    (avg - strike).max(0.0)
}

/// Undiscounted payoff of `kind` on `path`.
pub fn path_payoff(path: &PathGrid, contract: &IstanbulContract, kind: PayoffKind) -> f64 {
    let logs: Vec<f64> = path.values.iter().map(|v| v.ln()).collect();
    payoff_from_logs(&logs, contract, kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Crude,
    ControlVariate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths: usize,
    pub method: Method,
    /// Control coefficient, for the control-variate method.
    pub theta_star: Option<f64>,
    /// The control had zero sample variance and the crude estimate was returned.
    pub degenerate_control: bool,
}

/// Crude and (optionally) controlled estimates computed on the same paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedEstimates {
    pub crude: PriceEstimate,
    pub controlled: Option<PriceEstimate>,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Discounted per-path payoffs of `kind` and, when `with_control`, of the
/// geometric Asian call on the same paths.
fn discounted_samples(
    exec: Execution,
    config: &SimConfig,
    market: &MarketParams,
    contract: &IstanbulContract,
    kind: PayoffKind,
    with_control: bool,
) -> Result<Vec<(f64, f64)>> {
    let sim = PathSimulator::new(*config, *market)?;
    let discount = (-market.rate * market.maturity).exp();
    let n = config.steps;
    Ok(exec.map_indexed(
        config.paths as u64,
        || vec![0.0; n + 1],
        |logs, i| {
            sim.fill_log_path(i, logs);
            let target = discount * payoff_from_logs(logs, contract, kind);
            let control = if with_control { discount * payoff_from_logs(logs, contract, PayoffKind::Gac) } else { 0.0 };
            (target, control)
        },
    ))
}

/// Crude estimate and, if `config.use_cv`, the control-variate estimate on the
/// same simulated paths.
pub fn estimate_matched(
    exec: Execution,
    config: &SimConfig,
    market: &MarketParams,
    contract: &IstanbulContract,
    kind: PayoffKind,
) -> Result<MatchedEstimates> {
    config.validate()?;
    contract.validate()?;
    if config.use_cv && !matches!(kind, PayoffKind::Gic | PayoffKind::Aic) {
        return domain(format!("control variate applies to Istanbul payoffs only, got {kind:?}"));
    }
    let samples = discounted_samples(exec, config, market, contract, kind, config.use_cv)?;
    let targets: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let (value, std_error) = mean_and_se(&targets);
    let crude = PriceEstimate {
        value,
        std_error,
        paths: config.paths,
        method: Method::Crude,
        theta_star: None,
        degenerate_control: false,
    };
    if !config.use_cv {
        return Ok(MatchedEstimates { crude, controlled: None });
    }

    let n = samples.len() as f64;
    let mean_target = value;
    let mean_control = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut cov, mut var) = (0.0, 0.0);
    for &(h1, h2) in &samples {
        cov += (h1 - mean_target) * (h2 - mean_control);
        var += (h2 - mean_control) * (h2 - mean_control);
    }
    if var == 0.0 {
        let fallback = PriceEstimate { degenerate_control: true, ..crude };
        return Ok(MatchedEstimates { crude, controlled: Some(fallback) });
    }
    let theta = cov / var;
    let known = gac_price(market, contract.strike)?;
    let controlled: Vec<f64> = samples.iter().map(|&(h1, h2)| h1 - theta * (h2 - known)).collect();
    let (value, std_error) = mean_and_se(&controlled);
    let cv = PriceEstimate {
        value,
        std_error,
        paths: config.paths,
        method: Method::ControlVariate,
        theta_star: Some(theta),
        degenerate_control: false,
    };
    Ok(MatchedEstimates { crude, controlled: Some(cv) })
}

/// Monte-Carlo price of `kind` with the default scheduler.
pub fn price_mc(
    config: &SimConfig,
    market: &MarketParams,
    contract: &IstanbulContract,
    kind: PayoffKind,
) -> Result<PriceEstimate> {
    price_mc_with(Execution::default(), config, market, contract, kind)
}

pub fn price_mc_with(
    exec: Execution,
    config: &SimConfig,
    market: &MarketParams,
    contract: &IstanbulContract,
    kind: PayoffKind,
) -> Result<PriceEstimate> {
    let est = estimate_matched(exec, config, market, contract, kind)?;
    Ok(est.controlled.unwrap_or(est.crude))
}
