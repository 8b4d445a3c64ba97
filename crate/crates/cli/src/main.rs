use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use istanbul_core::report::{self, default_bump, format_sig6, ReportOverrides};
use istanbul_core::{
    delta_fd, price, run_report, Differencing, Engine, IstanbulContract, MarketParams, PricingError, ReportId,
    ReportSpec, SimConfig,
};

/// Geometric Istanbul call pricer.
#[derive(Parser, Debug)]
#[command(name = "istanbul", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Price one option.
    Price(PriceArgs),
    /// Delta by finite differences in the spot.
    Delta {
        #[command(flatten)]
        args: PriceArgs,
        /// Spot bump; defaults to 1% of spot.
        #[arg(long)]
        bump: Option<f64>,
        /// One-sided difference instead of central.
        #[arg(long)]
        forward: bool,
    },
    /// Write a table or figure data set as CSV.
    Report {
        #[arg(long, value_parser = parse_report_id)]
        id: ReportId,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "ISTANBUL_SEED", default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum EngineKind {
    Approx,
    Quadrature,
    Mc,
}

#[derive(Args, Debug)]
struct PriceArgs {
    #[arg(long, allow_negative_numbers = true)]
    s0: f64,
    #[arg(long, allow_negative_numbers = true)]
    strike: f64,
    #[arg(long, allow_negative_numbers = true)]
    barrier: f64,
    #[arg(long, allow_negative_numbers = true)]
    rate: f64,
    #[arg(long, allow_negative_numbers = true)]
    vol: f64,
    #[arg(long, allow_negative_numbers = true)]
    maturity: f64,
    #[arg(long, value_enum, default_value_t = EngineKind::Approx)]
    engine: EngineKind,
    #[arg(long, default_value_t = 2500)]
    steps: usize,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, env = "ISTANBUL_SEED", default_value_t = 42)]
    seed: u64,
    /// Geometric Asian control variate for the Monte-Carlo engine.
    #[arg(long)]
    cv: bool,
}

impl PriceArgs {
    fn inputs(&self) -> Result<(Engine, MarketParams, IstanbulContract), PricingError> {
        let market = MarketParams::new(self.s0, self.rate, self.vol, self.maturity)?;
        let contract = IstanbulContract::new(self.strike, self.barrier)?;
        let engine = match self.engine {
            EngineKind::Approx => Engine::Approx,
            EngineKind::Quadrature => Engine::quadrature(),
            EngineKind::Mc => {
                let cfg = SimConfig { steps: self.steps, paths: self.paths, seed: self.seed, use_cv: self.cv };
                cfg.validate()?;
                Engine::MonteCarlo(cfg)
            }
        };
        Ok((engine, market, contract))
    }
}

fn parse_report_id(s: &str) -> Result<ReportId, String> {
    s.parse().map_err(|e: PricingError| e.to_string())
}

fn run(cli: Cli) -> Result<(), PricingError> {
    match cli.command {
        Command::Price(args) => {
            let (engine, market, contract) = args.inputs()?;
            let quote = price(&engine, &market, &contract)?;
            println!("price {}", format_sig6(quote.value));
            if let Some(se) = quote.std_error {
                println!("std_error {}", format_sig6(se));
            }
        }
        Command::Delta { args, bump, forward } => {
            let (engine, market, contract) = args.inputs()?;
            let scheme = if forward { Differencing::Forward } else { Differencing::Central };
            let bump = bump.unwrap_or_else(|| default_bump(market.spot));
            let delta = delta_fd(&engine, &market, &contract, bump, scheme)?;
            println!("delta {}", format_sig6(delta));
        }
        Command::Report { id, out, seed } => {
            let spec = ReportSpec { id, overrides: ReportOverrides::default(), output_path: out, seed };
            let table = run_report(&spec)?;
            eprintln!("{}", report::summary(id, &table));
        }
    }
    Ok(())
}

fn exit_code(err: &PricingError) -> u8 {
    match err {
        PricingError::Domain(_) | PricingError::Regime { .. } | PricingError::NegativePrice(_) => 2,
        PricingError::Accuracy { .. } => 3,
        PricingError::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(exit_code(&PricingError::Domain("x".into())), 2);
        assert_eq!(exit_code(&PricingError::Regime { spot: 2.0, barrier: 1.0 }), 2);
        assert_eq!(exit_code(&PricingError::NegativePrice(-1.0)), 2);
        assert_eq!(exit_code(&PricingError::Accuracy { estimate: 1.0, error_bound: 1.0 }), 3);
        assert_eq!(exit_code(&PricingError::Io(std::io::ErrorKind::NotFound.into())), 4);
    }

    #[test]
    fn command_line_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
