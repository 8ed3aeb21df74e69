//! `symroot`: checks for fourth-root metrics with symmetric quartic coefficients.
//!
//! Exit status is 0 when the check passes, 1 on a definite failure (not positive
//! definite, residual over tolerance, oracle disagreement), 2 on usage or config errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "symroot",
    version,
    about = "Positive definiteness and curvature checks for symmetric fourth-root metrics"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write a CSV report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Seed for random sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Direction or sample count, depending on the command.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Tolerance for residual checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Positive definiteness and classification of a binary quartic.
    Check2d(CoefficientSource),
    /// Necessary conditions and numeric evidence for a ternary quartic.
    Check3d(CoefficientSource),
    /// Admissible n intervals for a grid of l and |m|.
    Table {
        /// Comma-separated values or inclusive integer ranges `a..b`.
        #[arg(long, default_value = "1,2,3,4")]
        l: String,
        #[arg(long, default_value = "0..11")]
        m: String,
    },
    /// Curvature of the surface model at points or on a grid.
    Curvature {
        config: PathBuf,
        /// Verify that the Gaussian curvature equals this constant.
        #[arg(long, allow_hyphen_values = true)]
        constant_k: Option<f64>,
        /// Use finite differences instead of exact partials.
        #[arg(long)]
        finite_difference: bool,
        /// Finite-difference step; defaults to a scale-aware step.
        #[arg(long, requires = "finite_difference")]
        step: Option<f64>,
    },
    /// Compare the closed-form criterion against the eigenvalue oracle.
    OracleCompare {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        config: Option<PathBuf>,
        /// Draw this many random coefficient sets instead.
        #[arg(long)]
        random: Option<usize>,
        /// Boundary margin, relative to 1 + sum of |coefficients|.
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
    },
    /// Grid classification of position-dependent coefficients.
    ClassifyField { config: PathBuf },
}

#[derive(Debug, Clone, Args)]
pub struct CoefficientSource {
    #[arg(required_unless_present = "coefficients", conflicts_with = "coefficients")]
    pub config: Option<PathBuf>,
    /// Monomial coefficients inline, e.g. `4,6,5`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub coefficients: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = output::emit(&outcome, &cli.global) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
