use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A grid needs at least three points (one interior unknown).
    TooFewPoints { n_points: usize },
    /// A scalar parameter is outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// `eps + mu b(x)` is not strictly positive somewhere on `[0, 1]`.
    NonPositiveDiffusion { x: f64, value: f64 },
    SigmaOutOfRange { sigma: f64 },
    InterfaceOutOfRange { index: usize, interfaces: usize },
    NonPositiveInterfaceDiffusion { interface: usize, value: f64 },
    /// A diagonal entry became non-positive after reaction folding. Refining
    /// the grid usually cures it.
    NonPositiveDiagonal { row: usize, value: f64 },
    ZeroPivot { row: usize, pivot: f64 },
    DimensionMismatch { expected: usize, found: usize },
    QuadratureNotConverged { achieved: f64, requested: f64 },
    /// Fixed-point iteration on a nonlinear source did not settle; `trace`
    /// holds the max-norm update of every iteration.
    PicardNotConverged { iterations: usize, trace: Vec<f64> },
    /// A step size that does not produce an integer number of grid points.
    InvalidStepSize { h: f64 },
    MissingExactSolution,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooFewPoints { n_points } => {
                write!(f, "grid needs at least 3 points, got {n_points}")
            }
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for parameter `{name}`")
            }
            Error::NonPositiveDiffusion { x, value } => write!(
                f,
                "effective diffusion eps + mu*b(x) = {value} is not positive at x = {x}"
            ),
            Error::SigmaOutOfRange { sigma } => {
                write!(f, "normalised coordinate {sigma} outside [0, 1]")
            }
            Error::InterfaceOutOfRange { index, interfaces } => write!(
                f,
                "interface index {index} out of range (grid has {interfaces} interfaces)"
            ),
            Error::NonPositiveInterfaceDiffusion { interface, value } => write!(
                f,
                "interface diffusion {value} is not positive at interface {interface}"
            ),
            Error::NonPositiveDiagonal { row, value } => write!(
                f,
                "diagonal entry {value} of row {row} is not positive after reaction folding; \
                 try refining the grid"
            ),
            Error::ZeroPivot { row, pivot } => {
                write!(f, "zero pivot {pivot:e} in row {row} of tridiagonal solve")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::QuadratureNotConverged { achieved, requested } => write!(
                f,
                "adaptive quadrature reached error estimate {achieved:e}, requested {requested:e}"
            ),
            Error::PicardNotConverged { iterations, trace } => {
                write!(f, "fixed-point iteration did not converge after {iterations} iterations; updates:")?;
                for (k, u) in trace.iter().enumerate() {
                    write!(f, " [{k}] {u:e}")?;
                }
                Ok(())
            }
            Error::InvalidStepSize { h } => {
                write!(f, "step size {h} does not divide [0, 1] into an integer number of cells")
            }
            Error::MissingExactSolution => write!(f, "problem has no exact solution"),
        }
    }
}

impl core::error::Error for Error {}
