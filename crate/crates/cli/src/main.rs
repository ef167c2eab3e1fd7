//! `cube-interact`: interaction indexes of functions on the unit cube.

mod commands;
mod expr;
mod report;
mod spec_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliResult, EstimatorArg, FormatArg, IndexCmd, LevelArg, MethodArgs, SpecArgs};

#[derive(Parser)]
#[command(
    name = "cube-interact",
    version,
    about = "Interaction indexes of functions on [0,1]^n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interaction index of one subset, or of every subset up to an order.
    Index {
        #[command(flatten)]
        spec: SpecArgs,
        /// Subset such as "{1,3}".
        #[arg(
            long,
            conflicts_with = "max_order",
            required_unless_present = "max_order"
        )]
        subset: Option<String>,
        #[arg(long)]
        max_order: Option<usize>,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best approximation of degree at most k.
    Approx {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Point "x1,...,xn" at which to evaluate the approximation.
        #[arg(long, allow_hyphen_values = true)]
        eval: Option<String>,
    },
    /// Mean, deviation, normalized indexes and goodness of fit.
    Stats {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of one index.
    Estimate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        subset: String,
        #[arg(long, value_enum)]
        estimator: EstimatorArg,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the property suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run only properties whose name contains this text.
        #[arg(long)]
        filter: Option<String>,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(text) = std::env::var("CUBE_INTERACT_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        text.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
            format!("CUBE_INTERACT_THREADS must be a positive integer, got {text:?}")
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Index {
            spec,
            subset,
            max_order,
            method,
            format,
            out,
        } => commands::index(IndexCmd {
            spec: &spec,
            subset: subset.as_deref(),
            max_order,
            method: &method,
            format,
            out: out.as_deref(),
        }),
        Command::Approx {
            spec,
            k,
            method,
            out,
            eval,
        } => commands::approx(&spec, k, &method, out.as_deref(), eval.as_deref()),
        Command::Stats {
            spec,
            k,
            method,
            out,
        } => commands::stats(&spec, k, &method, out.as_deref()),
        Command::Estimate {
            spec,
            subset,
            estimator,
            samples,
            seed,
        } => commands::estimate_cmd(&spec, &subset, estimator, samples, seed),
        Command::Verify {
            level,
            seed,
            filter,
        } => commands::verify_cmd(level, seed, filter.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
