//! Complete flux finite-volume scheme for one-dimensional singularly perturbed
//! advection-diffusion-reaction boundary-value problems.
//!
//! The problem class is the small-shift approximation of a differential-difference
//! equation on `(0, 1)`:
//!
//! ```text
//! -(eps + mu b(x)) phi'' + b(x) phi' + c(x) phi = q(x),   phi(0) = phi_L,  phi(1) = phi_R
//! ```
//!
//! The interface flux `f = b phi - (eps + mu b) phi'` is approximated from the
//! solution of a local two-point boundary-value problem, which splits it into a
//! homogeneous part (exponentially fitted, Bernoulli-function weights) and an
//! inhomogeneous part driven by the source. Summing fluxes over control volumes
//! gives a three-point scheme whose matrix is an M-matrix for every cell Péclet
//! number, so boundary layers are captured without oscillations.
//!
//! Modules, bottom-up:
//!
//! - [`special`]: Bernoulli, weight and flux Green's functions.
//! - [`problem`]: problem definitions, uniform grids and the built-in example library.
//! - [`flux`]: per-interface Péclet data, scheme coefficients and numerical fluxes.
//! - [`assembly`]: tridiagonal assembly, Thomas solver, M-matrix and stability diagnostics.
//! - [`verification`]: integral-representation flux oracle, error norms, truncation
//!   error and convergence studies.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod assembly;
mod error;
pub mod flux;
pub mod problem;
pub mod quadrature;
pub mod special;
pub mod verification;

pub use assembly::{assemble, solve, thomas_solve, Solution, StencilRow, TridiagonalSystem};
pub use error::{Error, Result};
pub use problem::{builtin_examples, make_grid, BuiltinExample, ExactSolution, Grid, ProblemSpec, ScalarField};
pub use verification::{convergence_study, max_norm_error, ConvergenceReport, ConvergenceRow};
