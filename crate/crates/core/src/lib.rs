//! Discretization, variational solvers, and inequality checks for the
//! nonlocal Dirichlet problem
//!
//! ```text
//! (-Δ)_{p(·)}^{s(·)} u = λ |u|^{α(x)-2} u + f(x,u)   in Ω,
//!                    u = 0                          in ℝⁿ \ Ω,
//! ```
//!
//! driven by the variable-order fractional p(x,y)-Laplacian.
//!
//! The crate is organized bottom-up:
//!
//! * [`problem`]: the analytic data (order `s`, exponent `p`, `α`, `r`, the
//!   power-law nonlinearity) and certification of the standing hypotheses.
//! * [`domain`]: the cell-centered grid over Ω, the exterior collar carrying
//!   the Dirichlet condition, and the cached singular-kernel pair weights.
//! * [`lebesgue`]: variable-exponent modulars and Luxemburg norms.
//! * [`nonlocal`]: the Gagliardo modular, the `X₀` norm, the operator, and
//!   the energy functional with its gradient.
//! * [`solvers`]: the local minimizer, the mountain-pass solver, the λ
//!   sweep, the nonnegative variant, and the eigenvalue problem.
//! * [`analysis`]: inequality suites, embedding-constant estimation, and the
//!   L∞ bootstrap ladder.

pub mod analysis;
pub mod domain;
mod error;
pub mod lebesgue;
pub mod nonlocal;
pub mod problem;
pub mod reduce;
pub mod solvers;

pub use domain::{build_domain, DiscreteDomain, GridFunction};
pub use error::{Error, Result};
pub use problem::{presets, ProblemSpec, SignMode};

/// A point of ℝⁿ for n ≤ 2; unused coordinates are zero.
pub type Point = [f64; 2];
