//! `winkler` — command-line front end for the beam-on-elastic-foundation
//! toolkit.
//!
//! Subcommands: `eval` (characteristic functions), `scan` (margin
//! certification), `spectrum` (Nystrom eigensolution), `deflect` (deflection
//! solvers).  Every report embeds the run manifest; output files are written
//! to a temporary sibling and renamed only on success.
//!
//! Exit codes: 0 success; 2 usage or domain error; 3 a certified inequality
//! or confinement check failed; 4 eigensolver non-convergence; 5 the
//! fixed-point map is not a contraction.

// domain guards are written as negated comparisons so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_VIOLATION: u8 = 3;
pub const EXIT_NO_CONVERGENCE: u8 = 4;
pub const EXIT_NON_CONTRACTION: u8 = 5;

#[derive(Parser)]
#[command(name = "winkler", version, about = "Beam-on-elastic-foundation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one characteristic function at a point
    Eval(EvalArgs),
    /// Certify the margin psi_L - q over a (kappa, L) region
    Scan(ScanArgs),
    /// Discretize the operator and report its full spectrum
    Spectrum(SpectrumArgs),
    /// Solve a beam deflection problem from a load profile
    Deflect(DeflectArgs),
}

/// Physical parameters shared by all subcommands (dimensionless canonical
/// case by default).
#[derive(Args, Clone, Copy)]
pub struct ConfigArgs {
    /// Young's modulus E
    #[arg(long = "E", default_value_t = 1.0)]
    pub e: f64,
    /// Mass moment of inertia I
    #[arg(long = "I", default_value_t = 1.0)]
    pub i: f64,
    /// Foundation spring constant k
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Half-length of the beam domain [-l, l]
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
}

#[derive(Args)]
pub struct EvalArgs {
    /// One of: q q' f f' ghat ghat' gL gL' gL_inv psi psi' K ghat_inv_closed
    pub function: String,
    /// Evaluation point
    pub x: f64,
    /// Dimensionless length L (default: derived from the config as 2*sqrt(2)*l*alpha)
    #[arg(long = "L")]
    pub big_l: Option<f64>,
    /// Kernel decay parameter alpha (default: derived as (k/(EI))^(1/4))
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Residual tolerance for gL_inv
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.01)]
    pub kappa_min: f64,
    #[arg(long, default_value_t = 50.0)]
    pub kappa_max: f64,
    #[arg(long = "L-min", default_value_t = 0.01)]
    pub l_min: f64,
    #[arg(long = "L-max", default_value_t = 50.0)]
    pub l_max: f64,
    /// Initial grid points along kappa
    #[arg(long, default_value_t = 500)]
    pub grid_kappa: usize,
    /// Initial grid points along L
    #[arg(long, default_value_t = 200)]
    pub grid_l: usize,
    /// Adaptive refinement depth
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// JSON report path
    #[arg(long, default_value = "scan_report.json")]
    pub out: PathBuf,
    /// Optional per-cell margin CSV (for plotting)
    #[arg(long)]
    pub cells: Option<PathBuf>,
    /// Negate the scanned predicate (self-test hook; a correct build exits 3)
    #[arg(long)]
    pub invert: bool,
    /// Recorded in the manifest for reproducibility bookkeeping
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Quadrature points
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    /// Quadrature rule: gauss_legendre or composite_simpson
    #[arg(long, default_value = "gauss_legendre")]
    pub rule: String,
    /// Confinement tolerance around the admissible interval
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Eigensolver off-diagonal tolerance
    #[arg(long, default_value_t = 1e-12)]
    pub solver_tol: f64,
    /// Decay-fit window start (1-based index)
    #[arg(long, default_value_t = 4)]
    pub window_lo: usize,
    /// Decay-fit window end (1-based index)
    #[arg(long, default_value_t = 12)]
    pub window_hi: usize,
    /// Eigenvalue CSV path
    #[arg(long, default_value = "spectrum.csv")]
    pub csv: PathBuf,
    /// JSON summary path
    #[arg(long, default_value = "spectrum.json")]
    pub json: PathBuf,
    /// Recorded in the manifest for reproducibility bookkeeping
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(clap::ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum DeflectMode {
    /// Green's convolution for the infinite beam
    Infinite,
    /// One application of the finite-interval operator
    Operator,
    /// Picard fixed point for a nonlinear foundation
    Nonlinear,
}

#[derive(Args)]
pub struct DeflectArgs {
    /// Load profile CSV with columns x,w
    #[arg(long)]
    pub load: PathBuf,
    #[arg(long, value_enum)]
    pub mode: DeflectMode,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Deflection CSV path
    #[arg(long, default_value = "deflection.csv")]
    pub out: PathBuf,
    /// Metadata JSON path (default: the CSV path with a .json extension)
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Evaluation grid spacing (infinite mode)
    #[arg(long, default_value_t = 0.02)]
    pub dx: f64,
    /// Decay margin beyond the load support (infinite mode; default 10/alpha)
    #[arg(long)]
    pub margin: Option<f64>,
    /// Quadrature points (operator and nonlinear modes)
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Quadrature rule: gauss_legendre or composite_simpson
    #[arg(long, default_value = "gauss_legendre")]
    pub rule: String,
    /// Cubic foundation coefficient eps in phi(u,x) = k*u + eps*u^3
    #[arg(long, default_value_t = 0.0)]
    pub phi_cubic: f64,
    /// Override the Lipschitz estimate of the foundation deviation
    #[arg(long)]
    pub lipschitz: Option<f64>,
    /// Fixed-point stopping tolerance (sup-norm of the update)
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Recorded in the manifest for reproducibility bookkeeping
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Map a toolkit error onto the exit-code contract.
fn exit_code_for(err: &winkler::Error) -> u8 {
    use winkler::Error;
    match err {
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        Error::NonContraction { .. } => EXIT_NON_CONTRACTION,
        Error::Io(_) => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Eval(args) => commands::eval::run(&args),
        Command::Scan(args) => commands::scan::run(&args),
        Command::Spectrum(args) => commands::spectrum::run(&args),
        Command::Deflect(args) => commands::deflect::run(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
