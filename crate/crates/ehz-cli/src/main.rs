mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "ehz", version, about = "EHZ capacity and Minkowski billiards for planar polygon products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Where the artifact goes: `--out`, else `$EHZ_OUT_DIR/<default name>`, else stdout.
#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Pair {
    /// Polygon JSON for the configuration factor
    #[arg(long = "K", value_name = "FILE")]
    pub k: PathBuf,
    /// Polygon JSON for the momentum factor
    #[arg(long = "T", value_name = "FILE")]
    pub t: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    SquareDiamond,
    TriangleTstar,
    Quadrilateral,
}

/// One member of the equality catalog.
#[derive(Args, Debug, Clone)]
pub struct CaseArgs {
    #[arg(long = "case", value_enum)]
    pub family: Family,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub a2: Option<f64>,
    /// Point t in -J(triangle), as "x,y"
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Triangle JSON for triangle-tstar; defaults to the centered unit-side triangle
    #[arg(long, value_name = "FILE")]
    pub triangle: Option<PathBuf>,
    /// QuadParams JSON for quadrilateral
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoveringKind {
    Trapezoid,
    Certify,
    Conjecture,
    Sweep,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Capacity of K x T as JSON
    Capacity {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = ehz::capacity::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Systolic ratio of K x T as JSON
    Ratio {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = ehz::capacity::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, default_value_t = 1e-6)]
        equality_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Builds a catalog product and checks that its systolic ratio is 1
    Equality {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = ehz::capacity::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, default_value_t = 2e-3)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Traces billiard trajectories of a catalog product and checks closure
    Zoll {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        /// Seed for random regular starts
        #[arg(long)]
        seed: Option<u64>,
        /// Use deterministic equispaced starts instead of random ones
        #[arg(long, conflicts_with = "seed")]
        equispaced: bool,
        #[arg(long, default_value_t = 12)]
        max_steps: usize,
        #[arg(long, default_value_t = 1e-6)]
        length_tol: f64,
        /// Write the full JSON report instead of the summary line
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Minimal hulls of translates
    Covering {
        #[arg(long, value_enum)]
        instance: CoveringKind,
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        a1: Option<f64>,
        #[arg(long)]
        a2: Option<f64>,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The two closed trajectories that are longer than the capacity
    Counterexample {
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Symplectic normal form of a triangle or quadrilateral product
    NormalForm {
        /// Point t on -J(boundary of the standard triangle), as "x,y"
        #[arg(long, value_name = "X,Y", allow_hyphen_values = true, conflicts_with = "params")]
        t: Option<String>,
        /// QuadParams JSON
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// SVG of K and T with a trajectory or the capacity-minimizing curve
    Plot {
        #[command(flatten)]
        pair: Pair,
        /// Start point on the boundary of K, as "x,y"
        #[arg(long, value_name = "X,Y", allow_hyphen_values = true, requires = "p")]
        q: Option<String>,
        /// Start point on the boundary of T, as "x,y"
        #[arg(long, value_name = "X,Y", allow_hyphen_values = true, requires = "q")]
        p: Option<String>,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input or parameters; exit 2.
    Invalid(String),
    /// A checked identity did not hold; the report is still written. Exit 3.
    Identity(String),
    /// Writing output failed; exit 1.
    Write(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Write(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Identity(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Identity(m) => write!(f, "check failed: {m}"),
            CliError::Write(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ehz: {e}");
            ExitCode::from(e.code())
        }
    }
}
