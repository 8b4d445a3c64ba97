//! Engine dispatch, finite-difference Delta and CSV reproduction of the
//! published tables and figure data.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::closed_form::{gac_price, gic_approx};
use crate::error::{domain, Result};
use crate::exec::Execution;
use crate::model::{IstanbulContract, MarketParams};
use crate::monte_carlo::{estimate_matched, price_mc_with, PayoffKind, SimConfig};
use crate::quadrature::gic_quadrature;

/// Pricing engine for the geometric Istanbul call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    Approx,
    Quadrature { rel_tol: f64 },
    MonteCarlo(SimConfig),
}

impl Engine {
    pub fn quadrature() -> Self {
        Self::Quadrature { rel_tol: 1e-8 }
    }
}

/// A price with its Monte-Carlo standard error when one exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quote {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Price of the geometric Istanbul call with `engine`.
pub fn price(engine: &Engine, market: &MarketParams, contract: &IstanbulContract) -> Result<Quote> {
    match engine {
        Engine::Approx => Ok(Quote { value: gic_approx(market, contract)?.value, std_error: None }),
        Engine::Quadrature { rel_tol } => {
            contract.validate()?;
            let value = if market.spot >= contract.barrier {
                gac_price(market, contract.strike)?
            } else {
                gic_quadrature(market, contract, *rel_tol)?.value
            };
            Ok(Quote { value, std_error: None })
        }
        Engine::MonteCarlo(cfg) => {
            let est = price_mc_with(Execution::default(), cfg, market, contract, PayoffKind::Gic)?;
            Ok(Quote { value: est.value, std_error: Some(est.std_error) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Differencing {
    #[default]
    Central,
    Forward,
}

/// Default spot bump: one percent of spot.
pub fn default_bump(spot: f64) -> f64 {
    1e-2 * spot
}

/// Finite-difference Delta. Monte-Carlo prices share the configured seed, so
/// the bumped prices use common random numbers.
pub fn delta_fd(
    engine: &Engine,
    market: &MarketParams,
    contract: &IstanbulContract,
    bump: f64,
    scheme: Differencing,
) -> Result<f64> {
    market.validate()?;
    if !(bump > 0.0 && bump <= 0.1 * market.spot) {
        return domain(format!("bump must lie in (0, 0.1*S0], got {bump}"));
    }
    let at = |s: f64| price(engine, &market.with_spot(s), contract).map(|q| q.value);
    match scheme {
        Differencing::Central => Ok((at(market.spot + bump)? - at(market.spot - bump)?) / (2.0 * bump)),
        Differencing::Forward => Ok((at(market.spot + bump)? - at(market.spot)?) / bump),
    }
}

/// Published table or figure to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReportId {
    Table1,
    Table2,
    Table3,
    Fig1,
    Fig2,
    Fig3,
}

impl ReportId {
    pub const ALL: [ReportId; 6] = [Self::Table1, Self::Table2, Self::Table3, Self::Fig1, Self::Fig2, Self::Fig3];

    pub fn name(self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::Table2 => "table2",
            Self::Table3 => "table3",
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
        }
    }
}

impl std::str::FromStr for ReportId {
    type Err = crate::error::PricingError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.name() == s).map_or_else(|| domain(format!("unknown report id {s:?}")), Ok)
    }
}

/// Simulation settings that replace the report defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReportOverrides {
    pub steps: Option<usize>,
    pub paths: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSpec {
    pub id: ReportId,
    pub overrides: ReportOverrides,
    pub output_path: PathBuf,
    pub seed: u64,
}

/// A table cell: a number, or the marker for a row whose engine failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Failed,
}

impl Cell {
    pub fn num(self) -> Option<f64> {
        match self {
            Self::Num(v) => Some(v),
            Self::Failed => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.contains(&Cell::Failed)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format_sig6(*v),
                    Cell::Failed => "failed".to_owned(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Fixed notation with six significant digits.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0.00000".to_owned() } else { v.to_string() };
    }
    let decimals = |x: f64| (5 - x.abs().log10().floor() as i32).max(0) as usize;
    let d = decimals(v);
    let s = format!("{v:.d$}");
    // rounding may carry into a new leading digit, e.g. 9.999996 -> 10.00000
    let rounded: f64 = s.parse().unwrap_or(v);
    let d2 = decimals(rounded);
    if d2 < d {
        format!("{v:.d2$}")
    } else {
        s
    }
}

/// Independent seed for cell `index` of a report.
pub fn cell_seed(master: u64, index: u64) -> u64 {
    master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub const RATE: f64 = 0.05;
pub const VOL: f64 = 0.3;
pub const TABLE_MATURITIES: [f64; 3] = [0.5, 1.0, 1.5];

/// `(S₀, K, B)` rows of the strike-above-barrier table.
pub const TABLE1_ROWS: [(f64, f64, f64); 9] = [
    (57.0, 63.0, 60.0),
    (58.0, 63.0, 60.0),
    (59.0, 63.0, 60.0),
    (60.0, 63.0, 63.0),
    (60.0, 64.0, 63.0),
    (60.0, 65.0, 63.0),
    (70.0, 75.0, 72.0),
    (70.0, 75.0, 73.0),
    (70.0, 75.0, 75.0),
];

/// `(S₀, K, B)` rows of the strike-below-barrier table.
pub const TABLE2_ROWS: [(f64, f64, f64); 9] = [
    (55.0, 56.0, 58.0),
    (56.0, 56.0, 58.0),
    (57.0, 56.0, 58.0),
    (60.0, 61.0, 64.0),
    (60.0, 62.0, 64.0),
    (60.0, 63.0, 64.0),
    (79.0, 81.0, 82.0),
    (79.0, 81.0, 85.0),
    (79.0, 81.0, 87.0),
];

pub const TABLE3_MATURITIES: [f64; 5] = [2.0, 3.0, 4.0, 5.0, 6.0];
/// `(S₀, K, B)` for the long-maturity rows.
pub const TABLE3_SETS: [(f64, f64, f64); 2] = [(75.0, 80.0, 79.0), (55.0, 56.0, 58.0)];

/// One table cell: `(S₀, K, B, T)`.
pub type Case = (f64, f64, f64, f64);

/// Cells of table 1 or 2 in row-major order.
pub fn table_cases(rows: &[(f64, f64, f64)]) -> Vec<Case> {
    rows.iter().flat_map(|&(s, k, b)| TABLE_MATURITIES.map(|t| (s, k, b, t))).collect()
}

/// Market and contract for a table case.
pub fn case_inputs(case: Case) -> Result<(MarketParams, IstanbulContract)> {
    let (s, k, b, t) = case;
    Ok((MarketParams::new(s, RATE, VOL, t)?, IstanbulContract::new(k, b)?))
}

/// Approximation and matched crude/CV Monte-Carlo for one case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseResult {
    pub approx: f64,
    pub mcv: f64,
    pub se: f64,
    pub crude_se: f64,
}

impl CaseResult {
    /// `|approx − MCV| / MCV` in percent.
    pub fn re_pct(&self) -> f64 {
        (self.approx - self.mcv).abs() / self.mcv * 100.0
    }
}

pub fn run_case(case: Case, config: &SimConfig) -> Result<CaseResult> {
    let (market, contract) = case_inputs(case)?;
    let approx = gic_approx(&market, &contract)?.value;
    let cfg = SimConfig { use_cv: true, ..*config };
    let est = estimate_matched(Execution::default(), &cfg, &market, &contract, PayoffKind::Gic)?;
    let cv = est.controlled.unwrap_or(est.crude);
    Ok(CaseResult { approx, mcv: cv.value, se: cv.std_error, crude_se: est.crude.std_error })
}

fn sim_config(seed: u64, overrides: &ReportOverrides) -> SimConfig {
    let d = SimConfig::default();
    SimConfig {
        steps: overrides.steps.unwrap_or(d.steps),
        paths: overrides.paths.unwrap_or(d.paths),
        seed,
        use_cv: true,
    }
}

fn cells_or_failed<const N: usize>(r: Result<[f64; N]>) -> Vec<Cell> {
    match r {
        Ok(v) => v.iter().map(|&x| Cell::Num(x)).collect(),
        Err(_) => vec![Cell::Failed; N],
    }
}

fn price_table(rows: &[(f64, f64, f64)], seed: u64, overrides: &ReportOverrides) -> Table {
    let mut table = Table::new(&["S0", "K", "B", "T", "approx", "mcv", "se", "re_pct"]);
    for (i, case) in table_cases(rows).into_iter().enumerate() {
        let cfg = sim_config(cell_seed(seed, i as u64), overrides);
        let (s, k, b, t) = case;
        let mut row = vec![Cell::Num(s), Cell::Num(k), Cell::Num(b), Cell::Num(t)];
        row.extend(cells_or_failed(run_case(case, &cfg).map(|r| [r.approx, r.mcv, r.se, r.re_pct()])));
        table.rows.push(row);
    }
    table
}

fn long_maturity_table(seed: u64, overrides: &ReportOverrides) -> Table {
    let mut table = Table::new(&["T", "re_t1", "re_t2"]);
    let mut index = 0u64;
    for t in TABLE3_MATURITIES {
        let mut row = vec![Cell::Num(t)];
        for (s, k, b) in TABLE3_SETS {
            let cfg = sim_config(cell_seed(seed, index), overrides);
            index += 1;
            row.extend(cells_or_failed(run_case((s, k, b, t), &cfg).map(|r| [r.re_pct()])));
        }
        table.rows.push(row);
    }
    table
}

/// `n` evenly spaced points from `lo` to `hi` computed without accumulation.
fn grid(lo: f64, step: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + i as f64 * step)
}

/// `μ²/8` with `μ = (r − σ²/2)/σ`.
pub fn mu_sq_over_8(rate: f64, vol: f64) -> f64 {
    let mu = (rate - 0.5 * vol * vol) / vol;
    mu * mu / 8.0
}

fn drift_table() -> Table {
    let mut table = Table::new(&["r", "sigma", "value"]);
    for r in grid(0.01, 0.005, 15) {
        for v in grid(0.10, 0.005, 81) {
            table.rows.push(vec![Cell::Num(r), Cell::Num(v), Cell::Num(mu_sq_over_8(r, v))]);
        }
    }
    table
}

/// `(panel, S₀, K, B)` points of the geometric/arithmetic comparison.
pub fn fig2_points() -> Vec<(u8, f64, f64, f64)> {
    let left = grid(70.0, 2.0, 16).map(|s| (1, s, 90.0, 105.0));
    let right = grid(70.0, 2.0, 16).map(|k| (2, 79.0, k, 85.0));
    left.chain(right).collect()
}

fn comparison_table(seed: u64, overrides: &ReportOverrides) -> Table {
    let mut table = Table::new(&["panel", "S0", "K", "B", "gic_approx", "aic_mc", "aic_se"]);
    for (i, (panel, s, k, b)) in fig2_points().into_iter().enumerate() {
        let cfg = sim_config(cell_seed(seed, i as u64), overrides);
        let cells = (|| {
            let market = MarketParams::new(s, RATE, VOL, 1.0)?;
            let contract = IstanbulContract::new(k, b)?;
            let gic = gic_approx(&market, &contract)?.value;
            let aic = price_mc_with(Execution::default(), &cfg, &market, &contract, PayoffKind::Aic)?;
            Ok([gic, aic.value, aic.std_error])
        })();
        let mut row = vec![Cell::Num(f64::from(panel)), Cell::Num(s), Cell::Num(k), Cell::Num(b)];
        row.extend(cells_or_failed(cells));
        table.rows.push(row);
    }
    table
}

/// `(panel, σ, T, S₀, K, B)` points of the Delta figure.
pub fn fig3_points() -> Vec<(u8, f64, f64, f64, f64, f64)> {
    let mut points = Vec::new();
    for vol in [0.2, 0.3, 0.4] {
        points.extend(grid(60.0, 1.0, 25).map(|s| (1, vol, 1.0, s, 80.0, 85.0)));
    }
    for t in TABLE_MATURITIES {
        points.extend(grid(60.0, 2.0, 21).map(|k| (2, VOL, t, 80.0, k, 85.0)));
    }
    points
}

fn delta_table() -> Table {
    let mut table = Table::new(&["panel", "sigma", "T", "S0", "K", "B", "delta"]);
    for (panel, vol, t, s, k, b) in fig3_points() {
        let delta = (|| {
            let market = MarketParams::new(s, RATE, vol, t)?;
            let contract = IstanbulContract::new(k, b)?;
            Ok([delta_fd(&Engine::Approx, &market, &contract, default_bump(s), Differencing::Central)?])
        })();
        let mut row = [f64::from(panel), vol, t, s, k, b].map(Cell::Num).to_vec();
        row.extend(cells_or_failed(delta));
        table.rows.push(row);
    }
    table
}

/// Compute a report in memory.
pub fn build_report(id: ReportId, seed: u64, overrides: &ReportOverrides) -> Table {
    match id {
        ReportId::Table1 => price_table(&TABLE1_ROWS, seed, overrides),
        ReportId::Table2 => price_table(&TABLE2_ROWS, seed, overrides),
        ReportId::Table3 => long_maturity_table(seed, overrides),
        ReportId::Fig1 => drift_table(),
        ReportId::Fig2 => comparison_table(seed, overrides),
        ReportId::Fig3 => delta_table(),
    }
}

/// Compute a report and write it as CSV to `spec.output_path`.
pub fn run_report(spec: &ReportSpec) -> Result<Table> {
    let table = build_report(spec.id, spec.seed, &spec.overrides);
    std::fs::write(&spec.output_path, table.to_csv())?;
    Ok(table)
}

/// One-line description of a report for logs.
pub fn summary(id: ReportId, table: &Table) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}: {} rows", id.name(), table.rows.len());
    let failed = table.failed_rows();
    if failed > 0 {
        let _ = write!(s, ", {failed} failed");
    }
    s
}
