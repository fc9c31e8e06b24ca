//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weakconc::hilbert::QuadraturePhase;

#[derive(Debug, Parser)]
#[command(
    name = "weakconc",
    version,
    about = "Weak-measurement entanglement concentration of the two-mode squeezed vacuum"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the machine-readable result to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Machine format for stdout / --out.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Override the cutoff of modes A and B.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Feed the closed-form weak value into the predicted state.
    #[arg(long)]
    pub analytic_weak_value: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario file.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the scenario's [sweep] grid.
    Sweep {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the verification suite.
    Verify,
    /// Weak value of n̂ for a coherent pre-selection |alpha>.
    Weakvalue {
        #[arg(long)]
        alpha: f64,
        /// Ancilla cutoff (default: tail guard at 1e-16).
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[command(subcommand)]
        scheme: SchemeArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Positive,
    Negative,
}

impl From<Convention> for QuadraturePhase {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Positive => QuadraturePhase::Positive,
            Convention::Negative => QuadraturePhase::Negative,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SchemeArgs {
    /// Coherent post-selection |magnitude e^{i phase}>.
    Coherent {
        #[arg(long)]
        magnitude: f64,
        #[arg(long, allow_negative_numbers = true)]
        phase: f64,
    },
    /// Squeezed-vacuum post-selection |r e^{i phi}>.
    Squeezed {
        #[arg(long)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
    },
    /// Homodyne post-selection <x_phi|.
    Quadrature {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, value_enum, default_value = "positive")]
        convention: Convention,
    },
}
