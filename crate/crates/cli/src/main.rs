//! `sbprk`: construct SBP operators and Runge-Kutta tableaux, certify their
//! stability properties and run small integration experiments.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sbprk", version, about = "SBP-SAT time integration operators and Runge-Kutta stability analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorFamily {
    Gauss,
    RadauLeft,
    RadauRight,
    Lobatto,
    Fd2,
    #[value(name = "counterexample-thm3")]
    ZeroEigenvalue,
    #[value(name = "example-ssp")]
    SspExample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableauKind {
    RadauIa,
    RadauIia,
    LobattoIiic,
    Gauss,
    #[value(name = "thm4")]
    NonSbp,
    ImplicitEuler,
    ExplicitEuler,
    ImplicitMidpoint,
    ExplicitMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquivalenceFamily {
    RadauLeft,
    RadauRight,
    Lobatto,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an SBP operator and write it as JSON.
    Operator {
        #[arg(long, value_enum)]
        family: OperatorFamily,
        /// Number of nodes (ignored for the two fixed examples).
        #[arg(long)]
        stages: Option<usize>,
        /// Interval length.
        #[arg(long = "T", default_value_t = 1.0)]
        interval: f64,
        /// Write the JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a Runge-Kutta tableau from an operator file or a classical family.
    Tableau {
        #[arg(long, conflicts_with = "classical", required_unless_present = "classical")]
        operator: Option<PathBuf>,
        #[arg(long, value_enum)]
        classical: Option<TableauKind>,
        #[arg(long)]
        stages: Option<usize>,
        /// Write the JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability report of a tableau.
    Analyze {
        tableau: PathBuf,
        /// Order of the C condition to check (default: s).
        #[arg(long)]
        eta: Option<usize>,
        /// Order of the D condition to check (default: s).
        #[arg(long)]
        zeta: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Eigenvalue check of the SAT matrix over a grid of penalty parameters.
    Assumption {
        operator: PathBuf,
        #[arg(long, default_value_t = sbprk::sbp::DEFAULT_SIGMA_MIN)]
        sigma_min: f64,
        #[arg(long, default_value_t = sbprk::sbp::DEFAULT_SIGMA_MAX)]
        sigma_max: f64,
        #[arg(long, default_value_t = sbprk::sbp::DEFAULT_SIGMA_SAMPLES)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare an SBP-SAT tableau with the matching classical method.
    Equivalence {
        #[arg(long, value_enum)]
        family: EquivalenceFamily,
        #[arg(long)]
        stages: usize,
    },
    /// Integrate a catalogued problem and write the trajectory.
    Integrate {
        tableau: PathBuf,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        blocks: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Errors against the exact solution and fitted order.
    Convergence {
        tableau: PathBuf,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
        blocks: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One-step contraction ratios for two initial states.
    Contractivity {
        tableau: PathBuf,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
        /// First initial state (default: the problem's initial value).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u0: Option<Vec<f64>>,
        /// Second initial state (default: half the first).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v0: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Search for an SBP-SAT representation of a tableau.
    Reconstruct {
        tableau: PathBuf,
        /// Number of random starts in addition to M = diag(b).
        #[arg(long, default_value_t = sbprk::rk::DEFAULT_PERTURBATIONS)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// One of dahlquist, forced-linear, cubic, stiff-2d.
    #[arg(long)]
    problem: String,
    /// Coefficient of the dahlquist problem.
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    lambda: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
