mod commands;
mod format;
mod input;

use clap::{Parser, Subcommand};
use commands::{Check, MethodArg};
use format::{envelope, Format, Output};
use input::GraphArgs;
use qconsensus::Error;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

/// Induced graphs, optimal weights and swap-dynamics checks for quantum consensus.
///
/// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 unsupported request,
/// 4 resource guard. Thread count follows RAYON_NUM_THREADS.
#[derive(Debug, Parser, Serialize)]
#[command(name = "qconsensus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Partitions of N with tabloid counts and Hasse cover edges.
    Partitions { n: usize },
    /// Induced graph of a partition and its spectrum.
    Induced {
        #[command(flatten)]
        graph: GraphArgs,
        /// Partition such as `2,2`.
        #[arg(long)]
        partition: String,
    },
    /// Edge weights maximizing λ₂ under a total budget.
    Optimize {
        #[command(flatten)]
        graph: GraphArgs,
        /// Total edge-weight budget D.
        #[arg(short = 'D', long = "budget", default_value_t = 1.0)]
        budget: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Structural checks on a graph.
    Verify {
        #[arg(value_enum)]
        which: Check,
        #[command(flatten)]
        graph: GraphArgs,
        /// Qudit dimension (reduction only).
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
        /// Seed of the random initial state (reduction only).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample times (reduction only).
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
        times: Vec<f64>,
    },
    /// Swap master equation trajectory of a random or given state.
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long = "d", default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 5.0, 10.0])]
        times: Vec<f64>,
        /// Initial density matrix JSON `{d, n, entries}` instead of a random state.
        #[arg(long)]
        state_file: Option<PathBuf>,
        /// Include the state at the last sample time in JSON output.
        #[arg(long)]
        emit_state: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Partitions { .. } => "partitions",
            Command::Induced { .. } => "induced",
            Command::Optimize { .. } => "optimize",
            Command::Verify { .. } => "verify",
            Command::Simulate { .. } => "simulate",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EmptyInput(_) | Error::Domain(_) | Error::Parameter(_) | Error::Parse(_) => 2,
        Error::Unsupported(_) => 3,
        Error::Resource(_) => 4,
        Error::CertificateUnavailable(_) | Error::Numerical(_) => 1,
    }
}

fn run(cli: &Cli) -> qconsensus::Result<Output> {
    match &cli.command {
        Command::Partitions { n } => commands::partitions(*n),
        Command::Induced { graph, partition } => {
            commands::induced(&input::select(graph)?, partition)
        }
        Command::Optimize {
            graph,
            budget,
            method,
        } => commands::optimize(&input::select(graph)?, *budget, *method),
        Command::Verify {
            which,
            graph,
            d,
            seed,
            times,
        } => commands::verify(&input::select(graph)?, *which, *d, *seed, times),
        Command::Simulate {
            graph,
            d,
            seed,
            times,
            state_file,
            emit_state,
        } => commands::simulate(
            &input::select(graph)?,
            *d,
            *seed,
            times,
            state_file.as_deref(),
            *emit_state,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match cli.format {
        Format::Table => Some(out.table),
        Format::Json => Some(
            serde_json::to_string_pretty(&envelope(cli.command.name(), &cli, &out.result))
                .expect("JSON output serializes")
                + "\n",
        ),
        Format::Csv => out.csv,
        Format::Dot => out.dot,
    };
    match text {
        Some(t) => print!("{t}"),
        None => {
            eprintln!(
                "error: {} has no {:?} output",
                cli.command.name(),
                cli.format
            );
            return ExitCode::from(2);
        }
    }
    if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
