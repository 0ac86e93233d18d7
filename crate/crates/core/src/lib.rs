//! Guaranteed-tolerance solver for scalar separable initial value problems.
//!
//! `y' = f(y)·g(x)`, `y(0) = y0` is rewritten as `∫_{y0}^{y(b)} p(y) dy = τ(b)`
//! with `p = 1/f` and `τ = ∫ g`. When `p` is positive, decreasing and convex,
//! lower-rectangular sums of `p` under-estimate the integral and trapezoidal
//! sums over-estimate it, so two grid nodes can be found that enclose `y(b)`
//! in an interval no wider than the requested tolerance.
//!
//! ```
//! use guaranteed_ivp::problem::SeparableProblem;
//! use guaranteed_ivp::solver::{algorithm2, SolverOptions, Variant};
//!
//! let prob = SeparableProblem::from_f(|y| y + 1.0, 0.0, 1.0).unwrap();
//! let rp = prob.reduce().unwrap();
//! let opts = SolverOptions::new(1e-4).variant(Variant::Midpoint);
//! let report = algorithm2(&rp, &opts).unwrap();
//! assert!((report.y_b - (1f64.exp() - 1.0)).abs() < 0.5e-4);
//! ```

pub mod cli;
pub mod error;
pub mod oracle;
pub mod problem;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
