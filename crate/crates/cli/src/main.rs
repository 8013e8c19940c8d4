//! `spectral-walk`: simulate birth and death processes and quantum walks from
//! their spectral measures, classify returns, and cross-check against dense
//! matrix exponentials.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "spectral-walk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write P_ij(t) and/or f_ij(t) as CSV, one file per pair, plus manifest.json.
    Simulate(SimulateArgs),
    /// Classify the return behaviour of a chain and print the verdict as JSON.
    Return(ReturnArgs),
    /// List the chain families and their parameters.
    Families {
        /// Print the registry as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare full propagators against dense matrix exponentials.
    Verify(VerifyArgs),
}

/// Where the chain comes from: a JSON spec (file or inline) or a family name
/// with parameters.
#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// JSON chain spec file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["spec_json", "family"])]
    pub spec: Option<PathBuf>,
    /// Inline JSON chain spec.
    #[arg(long, value_name = "JSON", conflicts_with = "family")]
    pub spec_json: Option<String>,
    /// Family name (see `families`).
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Finite chain size for `uniform` and `pst-demo` (n + 1 sites).
    #[arg(long)]
    pub n: Option<usize>,
    /// Operator size for semi-infinite families.
    #[arg(long)]
    pub sites: Option<usize>,
    /// Quadrature order for the continuous uniform measure.
    #[arg(long)]
    pub order: Option<usize>,
    /// Comma-separated birth rates for `custom`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Option<Vec<f64>>,
    /// Comma-separated death rates for `custom`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub mus: Option<Vec<f64>>,
    /// Tail tolerance for truncating infinite spectra.
    #[arg(long)]
    pub tail_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tmin: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub tmax: f64,
    /// Number of grid points (a single point when tmin = tmax).
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Classical transition probabilities P_ij(t).
    #[arg(long)]
    pub classical: bool,
    /// Quantum amplitudes f_ij(t) (the default).
    #[arg(long)]
    pub quantum: bool,
    /// Row sites; paired with --j, a single value is broadcast.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub i: Vec<usize>,
    /// Column sites.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub j: Vec<usize>,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub output: PathBuf,
    /// Also compare every series against the dense oracle.
    #[arg(long)]
    pub verify: bool,
    /// Largest accepted oracle difference.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ReturnArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Relative tolerance of the lattice test.
    #[arg(long, default_value_t = 1e-9)]
    pub lattice_tol: f64,
    /// Also write |f_ii(t)| on the time grid for every site in --i.
    #[arg(long)]
    pub scan: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub i: Vec<usize>,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Return(args) => commands::return_analysis(&args),
        Command::Families { json } => commands::families(json),
        Command::Verify(args) => commands::verify(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
