//! `qgame`: simulate the round game and analyze simulated or market series.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgame_core::analysis::SignalTransform;
use qgame_core::ingest::{DateFormat, SeriesTransform};

use crate::commands::MarketInput;
use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(name = "qgame", version, about = "Round-game volatility simulator and multifractal analysis")]
struct Cli {
    /// Flat `key = value` file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (key `out`, default `.`).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Tabular output format, csv or json (key `format`).
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads for the analysis; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the game and write trajectory plus metadata.
    Simulate(GameFlags),
    /// Large-deviation spectrum of one column.
    Spectrum {
        input: PathBuf,
        #[arg(long, default_value = "r")]
        column: String,
        /// Defaults to integrate for column `r`, levels otherwise.
        #[arg(long)]
        transform: Option<Transform>,
        #[command(flatten)]
        analysis: AnalysisFlags,
    },
    /// Log-binned histogram of a positive column and its power-law fit.
    Density {
        input: PathBuf,
        #[arg(long, default_value = "K")]
        column: String,
        #[arg(long)]
        bins: Option<String>,
    },
    /// Cumulative intrinsic time.
    Staircase {
        input: PathBuf,
        #[arg(long, default_value = "tau_B")]
        column: String,
    },
    /// Moments and absolute-value autocorrelation of one column.
    Stats {
        input: PathBuf,
        #[arg(long, default_value = "r")]
        column: String,
        #[arg(long)]
        max_lag: Option<String>,
    },
    /// Spectra of a simulated column and a dated market series, side by side.
    Compare {
        #[arg(long)]
        sim: PathBuf,
        #[arg(long, default_value = "K")]
        sim_column: String,
        #[arg(long, value_enum, default_value = "levels")]
        sim_transform: Transform,
        #[arg(long)]
        market: PathBuf,
        #[arg(long, default_value = "Date")]
        date_column: String,
        #[arg(long, default_value = "Close")]
        value_column: String,
        /// iso, day-first or month-first; detected when omitted.
        #[arg(long)]
        date_format: Option<String>,
        #[arg(long, value_enum, default_value = "levels")]
        market_transform: MarketTransform,
        #[command(flatten)]
        analysis: AnalysisFlags,
    },
}

#[derive(Args, Default)]
struct GameFlags {
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long = "D")]
    d: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    hbar_s: Option<String>,
    #[arg(long)]
    s0: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    rounds: Option<String>,
    #[arg(long)]
    transient: Option<String>,
    /// `random` or a value in [0, 1).
    #[arg(long)]
    i0: Option<String>,
    #[arg(long)]
    r_init: Option<String>,
}

impl GameFlags {
    fn entries(self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("epsilon", self.epsilon),
            ("u", self.u),
            ("D", self.d),
            ("mu", self.mu),
            ("dt", self.dt),
            ("sigma", self.sigma),
            ("b", self.b),
            ("hbar_s", self.hbar_s),
            ("s0", self.s0),
            ("seed", self.seed),
            ("rounds", self.rounds),
            ("transient", self.transient),
            ("i0", self.i0),
            ("r_init", self.r_init),
        ]
    }
}

#[derive(Args, Default)]
struct AnalysisFlags {
    /// Comma-separated box sizes, or `auto`.
    #[arg(long)]
    resolutions: Option<String>,
    /// Kernel bandwidth, or `auto`.
    #[arg(long)]
    bandwidth: Option<String>,
    #[arg(long)]
    grid_step: Option<String>,
    #[arg(long)]
    min_boxes: Option<String>,
    /// auto, unit_range or none.
    #[arg(long)]
    normalization: Option<String>,
}

impl AnalysisFlags {
    fn entries(self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("resolutions", self.resolutions),
            ("bandwidth", self.bandwidth),
            ("grid_step", self.grid_step),
            ("min_boxes", self.min_boxes),
            ("normalization", self.normalization),
        ]
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Transform {
    Integrate,
    Levels,
}

impl From<Transform> for SignalTransform {
    fn from(t: Transform) -> Self {
        match t {
            Transform::Integrate => SignalTransform::Integrate,
            Transform::Levels => SignalTransform::Levels,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MarketTransform {
    Levels,
    LogReturns,
}

impl From<MarketTransform> for SeriesTransform {
    fn from(t: MarketTransform) -> Self {
        match t {
            MarketTransform::Levels => SeriesTransform::Levels,
            MarketTransform::LogReturns => SeriesTransform::LogReturns,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let mut flags = vec![("out", cli.out), ("format", cli.format)];
    let load = |extra: Vec<(&'static str, Option<String>)>, mut flags: Vec<_>| {
        flags.extend(extra);
        RunConfig::load(cli.config.as_deref(), flags)
    };
    match cli.command {
        Command::Simulate(game) => commands::simulate_cmd(&load(game.entries(), flags)?),
        Command::Spectrum {
            input,
            column,
            transform,
            analysis,
        } => {
            let cfg = load(analysis.entries(), flags)?;
            commands::spectrum_cmd(&cfg, &input, &column, transform.map(Into::into))
        }
        Command::Density {
            input,
            column,
            bins,
        } => {
            flags.push(("bins", bins));
            commands::density_cmd(&load(vec![], flags)?, &input, &column)
        }
        Command::Staircase { input, column } => {
            commands::staircase_cmd(&load(vec![], flags)?, &input, &column)
        }
        Command::Stats {
            input,
            column,
            max_lag,
        } => {
            flags.push(("max_lag", max_lag));
            commands::stats_cmd(&load(vec![], flags)?, &input, &column)
        }
        Command::Compare {
            sim,
            sim_column,
            sim_transform,
            market,
            date_column,
            value_column,
            date_format,
            market_transform,
            analysis,
        } => {
            let cfg = load(analysis.entries(), flags)?;
            let date_format = date_format
                .map(|s| s.parse::<DateFormat>())
                .transpose()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let market = MarketInput {
                path: market,
                date_column,
                value_column,
                date_format,
                transform: market_transform.into(),
            };
            commands::compare_cmd(&cfg, &sim, &sim_column, sim_transform.into(), &market)
        }
    }
}

fn report(e: &CliError) -> ExitCode {
    let msg = e.to_string().replace(['\n', '\r'], " ");
    eprintln!("error[{}]: {}", e.code(), msg.trim());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return report(&CliError::Usage(
                first.trim_start_matches("error: ").to_string(),
            ));
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
