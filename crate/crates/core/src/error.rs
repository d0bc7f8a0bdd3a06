use std::fmt;
use std::io;

/// Error type shared across the toolkit.
#[derive(Debug)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain(String),
    /// Evaluation was requested at a singular point.
    Singular(String),
    /// Derivative requested at a corner point; `offset` is the signed
    /// distance of `g_L(kappa)` from the nearest multiple of `2*pi`.
    Nondifferentiable { offset: f64 },
    /// An iteration exhausted its budget without meeting its tolerance.
    NoConvergence { iterations: usize, residual: f64 },
    /// Quadrature rule identifier not recognized.
    UnsupportedRule(String),
    /// Sample vector length does not match the grid it is paired with.
    GridMismatch { expected: usize, got: usize },
    /// Grid has too few points for the requested stencil.
    GridTooCoarse { minimum: usize, got: usize },
    /// The fixed-point map is not a contraction (estimated factor >= 1).
    NonContraction { rho: f64 },
    /// Not enough reliable data for the requested window.
    InsufficientData(String),
    /// Malformed text input.
    Parse { line: usize, message: String },
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Singular(msg) => write!(f, "singularity: {msg}"),
            Error::Nondifferentiable { offset } => write!(
                f,
                "nondifferentiable point: g_L(kappa) is within tolerance of a multiple of 2*pi \
                 (offset {offset:e})"
            ),
            Error::NoConvergence { iterations, residual } => write!(
                f,
                "iteration failed to converge after {iterations} steps (residual {residual:e})"
            ),
            Error::UnsupportedRule(rule) => write!(f, "unsupported quadrature rule: {rule}"),
            Error::GridMismatch { expected, got } => {
                write!(f, "grid mismatch: expected {expected} samples, got {got}")
            }
            Error::GridTooCoarse { minimum, got } => {
                write!(f, "grid too coarse: need at least {minimum} points, got {got}")
            }
            Error::NonContraction { rho } => write!(
                f,
                "fixed-point map is not a contraction: estimated factor {rho} >= 1"
            ),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            Error::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Self {
        Error::Io(err)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
