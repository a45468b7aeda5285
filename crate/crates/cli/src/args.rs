use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bound states of V(r) = A/r^2 - B/r + C r^kappa.
#[derive(Parser, Debug)]
#[command(name = "aim", version, about, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Eigenvalues for kappa = 1, 2 by the asymptotic iteration method.
    Solve(Options),
    /// Per-iteration trace of one state for one or more beta values.
    Converge(Options),
    /// Closed-form levels for kappa = 0, -1, -2.
    Exact(Options),
    /// Re-run a stored reference table (1-5) and compare cell by cell.
    Table {
        id: String,
        #[command(flatten)]
        options: Options,
    },
    /// Sampled radial functions.
    Wavefunction(Options),
    /// Independent Numerov shooting estimate.
    Oracle(Options),
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<i32>,

    #[arg(long = "A", conflicts_with = "reduced")]
    pub a: Option<String>,
    #[arg(long = "B", conflicts_with = "reduced")]
    pub b: Option<String>,
    #[arg(long = "C", conflicts_with = "reduced")]
    pub c: Option<String>,
    #[arg(long, conflicts_with = "reduced")]
    pub mass: Option<String>,
    #[arg(long, conflicts_with = "reduced")]
    pub hbar: Option<String>,

    /// Give A~ and gamma directly instead of physical parameters.
    #[arg(long)]
    pub reduced: bool,
    #[arg(long = "a-tilde", requires = "reduced")]
    pub a_tilde: Option<String>,
    #[arg(long, requires = "reduced")]
    pub gamma: Option<String>,

    /// Radial quantum numbers: `2`, `0,2` or `0..2` (inclusive).
    #[arg(long)]
    pub n: Option<String>,
    /// Orbital quantum numbers, same syntax as `--n`.
    #[arg(long)]
    pub l: Option<String>,

    /// Convergence constant; a comma-separated list under `converge`.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<String>,
    #[arg(long = "k-min")]
    pub k_min: Option<usize>,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long = "precision-bits", env = "AIM_PRECISION_BITS")]
    pub precision_bits: Option<u32>,

    #[arg(long = "scan-min", allow_hyphen_values = true)]
    pub scan_min: Option<String>,
    #[arg(long = "scan-max", allow_hyphen_values = true)]
    pub scan_max: Option<String>,
    #[arg(long = "scan-step")]
    pub scan_step: Option<String>,

    /// Outer edge of the wavefunction grid (physical r, or rho in reduced mode).
    #[arg(long = "r-max")]
    pub r_max: Option<String>,
    /// Wavefunction grid size.
    #[arg(long)]
    pub points: Option<usize>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
