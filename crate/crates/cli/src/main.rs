//! `nwa`: plan, assess and tune non-wire alternatives from a JSON config.
//!
//! Exit codes: 0 success, 2 infeasible model, 1 any other error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nwa", version, about = "Non-wire alternative planning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Overrides the configuration's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Maximum number of worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Log verbosity.
    #[arg(long, global = true, value_enum, default_value_t = LogLevel::Warn)]
    log_level: LogLevel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogLevel {
    Error,
    Warn,
    Info,
    Debug,
    Trace,
}

impl From<LogLevel> for log::LevelFilter {
    fn from(l: LogLevel) -> Self {
        match l {
            LogLevel::Error => log::LevelFilter::Error,
            LogLevel::Warn => log::LevelFilter::Warn,
            LogLevel::Info => log::LevelFilter::Info,
            LogLevel::Debug => log::LevelFilter::Debug,
            LogLevel::Trace => log::LevelFilter::Trace,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TechniqueArg {
    Dwda,
    Sequential,
}

impl From<TechniqueArg> for nwa_core::plan::Technique {
    fn from(t: TechniqueArg) -> Self {
        match t {
            TechniqueArg::Dwda => nwa_core::plan::Technique::Dwda,
            TechniqueArg::Sequential => nwa_core::plan::Technique::Sequential,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Co-optimize NWA investments and the expansion year.
    Plan(PlanArgs),
    /// Expansion year and present cost for a given peak-load forecast.
    Capex(CapexArgs),
    /// Monte Carlo assessment of a plan against the configured scenarios.
    Assess(AssessArgs),
    /// Plan and assess over a grid of protection levels.
    Sweep(SweepArgs),
    /// Write synthetic scenario files.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Configuration JSON.
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = TechniqueArg::Dwda)]
    pub technique: TechniqueArg,
    /// Plan JSON output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Iteration log, one JSON object per line (default: next to --out).
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Overrides the configured protection level.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CapexArgs {
    pub config: PathBuf,
    /// CSV with header `year,value`: forecast peak load per year, MW.
    #[arg(long)]
    pub peaks: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssessArgs {
    pub config: PathBuf,
    /// Plan JSON written by `nwa plan`.
    #[arg(long)]
    pub plan: PathBuf,
    /// Output directory for assessment.json and assessment.csv (default:
    /// JSON summary on stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the configured number of draws.
    #[arg(long)]
    pub draws: Option<usize>,
    /// Overrides the configured value of lost load, $/MWh.
    #[arg(long)]
    pub voll: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// Comma-separated protection levels in [0, 1].
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub gammas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = TechniqueArg::Sequential)]
    pub technique: TechniqueArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub voll: Option<f64>,
    /// VOLL values ($/MWh) for the protection-level-versus-VOLL curve.
    #[arg(long, value_delimiter = ',', default_value = "0,1000,10000,100000")]
    pub voll_grid: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SynthKind {
    Load,
    Pv,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub config: PathBuf,
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Number of scenarios.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Load: lowest annual growth rate.
    #[arg(long, default_value_t = 0.015)]
    pub growth_min: f64,
    /// Load: highest annual growth rate.
    #[arg(long, default_value_t = 0.035)]
    pub growth_max: f64,
    /// Relative per-cell noise amplitude.
    #[arg(long, default_value_t = 0.03)]
    pub noise: f64,
    /// PV: largest fractional output reduction from clouds.
    #[arg(long, default_value_t = 0.4)]
    pub cloudiness: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level.into())
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Plan(a) => commands::plan(a),
        Command::Capex(a) => commands::capex(a),
        Command::Assess(a) => commands::assess(a, cli.seed),
        Command::Sweep(a) => commands::sweep(a, cli.seed),
        Command::Synth(a) => commands::synth(a, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = e
                .chain()
                .any(|c| c.downcast_ref::<nwa_core::Error>().is_some_and(|e| e.is_infeasible()));
            ExitCode::from(if infeasible { 2 } else { 1 })
        }
    }
}
