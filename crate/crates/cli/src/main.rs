//! `coinrep`: qubit states as coin probabilities, from the command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 domain precondition
//! violation (non-quantum state, degenerate superposition and so on).

mod commands;
mod error;
mod state;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coinrep_core::exec::Execution;

#[derive(Debug, Parser)]
#[command(name = "coinrep", version, about = "Qubit states as triples of coin probabilities")]
struct Cli {
    /// Run randomized sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantum validity, purity, spectrum and entropies of a qubit state.
    Check(CheckArgs),
    /// Superpose two pure states with a pure key state.
    Superpose(SuperposeArgs),
    /// Unitary evolution under a dichotomic observable as Hamiltonian.
    Evolve(EvolveArgs),
    /// Draw the square triada of a state as SVG.
    Render(RenderArgs),
    /// Two-qubit amplitude tables and the 16x16 permutation.
    Matrix {
        #[command(subcommand)]
        command: MatrixCommand,
    },
    /// Recheck the known inconsistencies of the printed formulas.
    Errata(ErrataArgs),
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// State file (probability-triple or density2).
    state: PathBuf,
    /// Tsallis entropy index.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightsConvention {
    /// Pick the mapping that passes the orthogonal-state sweep, if any.
    Auto,
    KeyPopulation,
    Equal,
}

#[derive(Debug, Args)]
struct SuperposeArgs {
    state1: PathBuf,
    state2: PathBuf,
    key: PathBuf,
    /// Where to write the resulting state file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Weights of the operator form used for the oracle comparison.
    #[arg(long, value_enum, default_value_t = WeightsConvention::Auto)]
    weights_convention: WeightsConvention,
    /// Seed of the convention sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per regime in the convention sweep.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Propagator,
    Integrator,
    Both,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    state: PathBuf,
    /// Hamiltonian as x,y,z1,z2.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_obs)]
    obs: [f64; 4],
    /// Final time.
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Propagator)]
    method: MethodArg,
    /// Trajectory file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_obs(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 4]>::try_from(v).map_err(|v| format!("expected 4 numbers x,y,z1,z2, got {}", v.len()))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LayoutArg {
    Triangle,
    Triada,
    Tower,
}

#[derive(Debug, Args)]
struct RenderArgs {
    state: PathBuf,
    #[arg(long, value_enum, default_value_t = LayoutArg::Triada)]
    layout: LayoutArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 480.0)]
    width: f64,
    #[arg(long, default_value_t = 320.0)]
    height: f64,
    /// Pixels per unit length.
    #[arg(long, default_value_t = 100.0)]
    scale: f64,
}

#[derive(Debug, Subcommand)]
enum MatrixCommand {
    /// amplitude2 state -> prob-table-15 state.
    Parametrize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// prob-table-15 state -> amplitude2 state.
    Reconstruct {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the permutation against the component lists on random matrices.
    TCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
struct ErrataArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Print the ledger as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match commands::run(cli.command, exec) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("coinrep: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
