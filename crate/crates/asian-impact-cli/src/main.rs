//! `asian-impact`: prices Asian calls on an impact-adjusted binomial
//! lattice, reports the no-arbitrage volume region, sweeps parameters to
//! CSV, and compares the zero-impact lattice against the closed-form
//! geometric benchmark.
//!
//! Exit codes: 0 success, 2 validation or config error, 3 arbitrage
//! violation, 4 enumeration cap exceeded.

mod commands;
mod config;
mod fmt;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use asian_impact::kemna_vorst::Averaging;
use asian_impact::{MethodChoice, PricingError, RateConvention};

use config::{ConfigError, RawConfig, Regime};
use sweep::{SweepAxis, SweepPlan};

/// A terminal failure: message for stderr plus the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: 2 }
    }
}

impl From<ConfigError> for Failure {
    fn from(err: ConfigError) -> Self {
        Self::validation(err.to_string())
    }
}

impl From<PricingError> for Failure {
    fn from(err: PricingError) -> Self {
        let code = match err {
            PricingError::ArbitrageViolation { .. } => 3,
            PricingError::CapExceeded { .. } => 4,
            _ => 2,
        };
        Self { message: err.to_string(), code }
    }
}

#[derive(Parser)]
#[command(name = "asian-impact", version, about = "Asian option pricing on a lattice with permanent price impact")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price one option and print the adjusted lattice and bounds.
    Price(PriceArgs),
    /// Show the minimal hedging volumes keeping the lattice arbitrage-free.
    Region(RegionArgs),
    /// Vary one parameter and emit CSV rows.
    Sweep(SweepArgs),
    /// Compare zero-impact lattice prices with the closed-form benchmark.
    Benchmark(BenchmarkArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Initial asset price.
    #[arg(long)]
    s0: Option<f64>,
    /// Strike price.
    #[arg(long)]
    strike: Option<f64>,
    /// Up factor per step.
    #[arg(long)]
    up: Option<f64>,
    /// Down factor per step.
    #[arg(long)]
    down: Option<f64>,
    /// Gross interest rate; see --rate-convention.
    #[arg(long)]
    rate: Option<f64>,
    /// Whether --rate applies to each step or to the whole horizon.
    #[arg(long, value_enum)]
    rate_convention: Option<RateConventionArg>,
    /// Number of lattice steps.
    #[arg(long)]
    steps: Option<u32>,
    /// Impact coefficient (lambda >= 0).
    #[arg(long)]
    lambda: Option<f64>,
    /// Hedging volume on up moves.
    #[arg(long, allow_hyphen_values = true)]
    vu: Option<f64>,
    /// Hedging volume on down moves.
    #[arg(long, allow_hyphen_values = true)]
    vd: Option<f64>,
    /// Summation route for the geometric price.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Largest n priced by full path enumeration.
    #[arg(long)]
    cap: Option<u32>,
    /// Config file of `key = value` lines; CLI flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write output to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which parameter the sweep varies.
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    /// First axis value.
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    /// Last axis value.
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    /// Number of evenly spaced points (at least 2).
    #[arg(long)]
    points: Option<u32>,
    /// Hedging-volume preset; an alternative to explicit --vu/--vd.
    #[arg(long, value_enum, conflicts_with_all = ["vu", "vd"])]
    regime: Option<RegimeArg>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which average the closed form models.
    #[arg(long, value_enum, default_value_t = AveragingArg::Continuous)]
    averaging: AveragingArg,
    /// Smallest step count compared.
    #[arg(long, default_value_t = 2)]
    n_from: u32,
    /// Largest step count compared.
    #[arg(long, default_value_t = 20)]
    n_to: u32,
    /// Stride through the step counts.
    #[arg(long, default_value_t = 2)]
    n_step: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RateConventionArg {
    /// --rate is the gross rate of one lattice step.
    PerStep,
    /// --rate is the gross rate over the whole horizon.
    Total,
}

impl RateConventionArg {
    fn domain(self) -> RateConvention {
        match self {
            RateConventionArg::PerStep => RateConvention::PerStep,
            RateConventionArg::Total => RateConvention::TotalHorizon,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Enum,
    Recombined,
    Auto,
}

impl MethodArg {
    fn domain(self) -> MethodChoice {
        match self {
            MethodArg::Enum => MethodChoice::Enumeration,
            MethodArg::Recombined => MethodChoice::Recombined,
            MethodArg::Auto => MethodChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Lambda,
    Vu,
    Vd,
    Moneyness,
    Maturity,
}

impl AxisArg {
    fn domain(self) -> SweepAxis {
        match self {
            AxisArg::Lambda => SweepAxis::Lambda,
            AxisArg::Vu => SweepAxis::Vu,
            AxisArg::Vd => SweepAxis::Vd,
            AxisArg::Moneyness => SweepAxis::Moneyness,
            AxisArg::Maturity => SweepAxis::Maturity,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    UpBiased,
    DownBiased,
    Symmetric,
}

impl RegimeArg {
    fn domain(self) -> Regime {
        match self {
            RegimeArg::UpBiased => Regime::UpBiased,
            RegimeArg::DownBiased => Regime::DownBiased,
            RegimeArg::Symmetric => Regime::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AveragingArg {
    Continuous,
    Discrete,
}

impl AveragingArg {
    fn domain(self) -> Averaging {
        match self {
            AveragingArg::Continuous => Averaging::Continuous,
            AveragingArg::Discrete => Averaging::Discrete,
        }
    }
}

impl CommonArgs {
    fn to_raw(&self) -> RawConfig {
        RawConfig {
            s0: self.s0,
            strike: self.strike,
            u: self.up,
            d: self.down,
            rate: self.rate,
            rate_convention: self.rate_convention.map(RateConventionArg::domain),
            n: self.steps,
            lambda: self.lambda,
            vu: self.vu,
            vd: self.vd,
            method: self.method.map(MethodArg::domain),
            cap: self.cap,
            out: self.out.clone(),
            ..RawConfig::default()
        }
    }

    fn merged(&self, cli_layer: RawConfig) -> Result<RawConfig, Failure> {
        let file_layer = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        Ok(file_layer.overridden_by(cli_layer))
    }
}

fn run() -> Result<(), Failure> {
    let cli = Cli::parse();
    let (output, out_path) = match cli.command {
        Command::Price(args) => {
            let resolved = config::resolve(&args.common.merged(args.common.to_raw())?)?;
            (commands::cmd_price(&resolved)?, resolved.out)
        }
        Command::Region(args) => {
            let resolved = config::resolve(&args.common.merged(args.common.to_raw())?)?;
            (commands::cmd_region(&resolved)?, resolved.out)
        }
        Command::Sweep(args) => {
            let mut cli_layer = args.common.to_raw();
            cli_layer.axis = args.axis.map(AxisArg::domain);
            cli_layer.from = args.from;
            cli_layer.to = args.to;
            cli_layer.points = args.points;
            cli_layer.regime = args.regime.map(RegimeArg::domain);
            let mut merged = args.common.merged(cli_layer)?;
            let plan = SweepPlan::from_config(&merged)?;
            // The maturity axis replaces n per row, so a missing --steps
            // defaults to the first point instead of being required.
            if plan.axis == SweepAxis::Maturity && merged.n.is_none() {
                merged.n = Some(plan.from.round() as u32);
            }
            let resolved = config::resolve(&merged)?;
            (commands::cmd_sweep(&resolved, &plan), resolved.out)
        }
        Command::Benchmark(args) => {
            let mut merged = args.common.merged(args.common.to_raw())?;
            // The benchmark prices its own list of step counts.
            if merged.n.is_none() {
                merged.n = Some(args.n_from.max(1));
            }
            let resolved = config::resolve(&merged)?;
            let csv = commands::cmd_benchmark(
                &resolved,
                args.averaging.domain(),
                args.n_from,
                args.n_to,
                args.n_step,
            )?;
            (csv, resolved.out)
        }
    };

    match out_path {
        Some(path) => std::fs::write(&path, output).map_err(|err| {
            Failure::validation(format!("cannot write {}: {err}", path.display()))
        })?,
        None => print!("{output}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
