// Stdout writes that tolerate a closed pipe (e.g. `| head`); output files are still written.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FirstPeriodChoice, FlagConfig, Format, ModelChoice, ResponseChoice};
use error::CliError;

/// Semi-log and threshold regressions of T-bill yields on stablecoin market share.
#[derive(Parser)]
#[command(name = "tbill-impact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a panel CSV and print summary statistics.
    Validate {
        input: PathBuf,
        #[arg(long, value_enum)]
        first_period: Option<FirstPeriodChoice>,
    },
    /// Estimate baseline and/or threshold models and write reports.
    Fit(FitArgs),
    /// Write a synthetic panel with a planted regime break.
    Simulate(SimulateArgs),
    /// Translate a fitted semi-elasticity into basis points and savings.
    Impact(ImpactArgs),
}

#[derive(Args)]
struct FitArgs {
    input: PathBuf,
    /// TOML file of run settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    response: Option<ResponseChoice>,
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    #[arg(long)]
    trim_fraction: Option<f64>,
    #[arg(long, value_name = "BOOL")]
    refined_grid: Option<bool>,
    #[arg(long, value_name = "BOOL")]
    intercept_shift: Option<bool>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Defaults to $TBILL_IMPACT_OUTPUT_DIR, then ./tbill-impact-output.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    formats: Option<Vec<Format>>,
    #[arg(long, value_enum)]
    first_period: Option<FirstPeriodChoice>,
    /// Worker threads for the bootstrap.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    planted_tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    low_slope: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    high_slope: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    intercept_shift: Option<f64>,
    #[arg(long)]
    noise_sd: Option<f64>,
    /// Equal slopes and no shift.
    #[arg(long)]
    linear: bool,
}

#[derive(Args)]
pub struct ImpactArgs {
    /// A baseline or threshold report written by `fit`.
    #[arg(long)]
    fit: PathBuf,
    /// Model label such as `(3)`; defaults to the last column.
    #[arg(long)]
    column: Option<String>,
    /// Change in market share, decimal fraction.
    #[arg(long, allow_hyphen_values = true)]
    delta_share: f64,
    /// Percent per annum.
    #[arg(long)]
    baseline_yield: f64,
    /// USD of bills outstanding.
    #[arg(long, default_value_t = 6.2e12)]
    outstanding: f64,
    /// Starting share of the path; defaults to the threshold for threshold
    /// models and to the smallest admissible share for linear ones.
    #[arg(long)]
    reference_share: Option<f64>,
    #[arg(long)]
    json: bool,
}

fn fit_flags(a: &FitArgs) -> FlagConfig {
    FlagConfig {
        response: a.response,
        model: a.model,
        trim_fraction: a.trim_fraction,
        refined_grid: a.refined_grid,
        include_intercept_shift: a.intercept_shift,
        replications: a.replications,
        seed: a.seed,
        output_dir: a.output_dir.clone(),
        formats: a.formats.clone(),
        first_period: a.first_period,
        threads: a.threads,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { input, first_period } => {
            commands::validate(&input, first_period.map(Into::into).unwrap_or_default())
        }
        Command::Fit(args) => commands::fit(args.input.clone(), args.config.as_deref(), fit_flags(&args)),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Impact(args) => commands::impact(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(error::exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
