//! Command-line front end for the wave-tracking toolkit.
//!
//! Subcommands: `simulate`, `demodulate`, `dic`, `bench`, `dispersion`,
//! `synthseq`. Every command reads a JSON config, writes its artifacts plus
//! a run manifest into the output directory, and is bit-reproducible from
//! the manifest. Exit codes: 0 success, 1 I/O error, 2 constraint or
//! validation failure, 3 estimation failure.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "texwave", version, about = "Periodic-texture wave tracking toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the configuration seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Cap the worker thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Ground-truth displacement container for MSE reporting.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Emit SVG plots.
    #[arg(long)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reference pattern, a deformed noisy observation and the
    /// ground-truth displacement for a wave scenario.
    Simulate(CommonArgs),
    /// Demodulate a reference/deformed image pair into a displacement field.
    Demodulate(CommonArgs),
    /// Run the block-matching DIC baseline on an image pair.
    Dic(CommonArgs),
    /// Monte-Carlo MSE sweeps with a Cramér-Rao bound overlay.
    Bench(CommonArgs),
    /// Frame-sequence dispersion analysis.
    Dispersion(CommonArgs),
    /// Synthesize a traveling-wave frame sequence.
    Synthseq(CommonArgs),
}

/// Command failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<texwave_core::Error> for CliError {
    fn from(err: texwave_core::Error) -> Self {
        use texwave_core::Error as E;
        let code = match &err {
            E::Io(_) => 1,
            E::InvalidGeometry(_)
            | E::NonFinite
            | E::InvalidArgument(_)
            | E::ConstraintViolation(_)
            | E::Format(_)
            | E::Json(_) => 2,
            E::OrientationNotFound
            | E::NoCarrier
            | E::EstimationFailed(_)
            | E::BandEmpty
            | E::Sequence(_) => 3,
        };
        CliError::new(code, err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::new(1, err.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::new(2, format!("config error: {err}"))
    }
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => {
            init_threads(args.threads);
            commands::simulate::run(&args)
        }
        Command::Demodulate(args) => {
            init_threads(args.threads);
            commands::demodulate::run(&args)
        }
        Command::Dic(args) => {
            init_threads(args.threads);
            commands::dic::run(&args)
        }
        Command::Bench(args) => {
            init_threads(args.threads);
            commands::bench::run(&args)
        }
        Command::Dispersion(args) => {
            init_threads(args.threads);
            commands::dispersion::run(&args)
        }
        Command::Synthseq(args) => {
            init_threads(args.threads);
            commands::synthseq::run(&args)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
