//! Numerical toolkit for multi-term time-fractional diffusion-wave equations
//!
//! ```text
//! c D^α u + Σ c_j D^{α_j} u = A u,   1 < α ≤ 2,  α − α_m ≤ 1
//! ```
//!
//! The solution operator of such an equation is subordinate to the cosine
//! family generated by `A`: `S(t) = ∫ φ(t,τ) S₂(τ) dτ` with a probability
//! density `φ`. This crate evaluates `φ`, the propagation function `w(x,t)`,
//! the fundamental solutions `G_c`, `G_s` and the density `ψ` subordinating
//! to the single-term operator, all from real-axis integral representations,
//! and uses them for two concrete solvers (whole line, unit interval).
//!
//! Modules, bottom-up:
//!
//! - [`problem`]: validated parameter set and its Laplace symbols.
//! - [`quadrature`]: oscillatory improper integrals and an inverse-Laplace oracle.
//! - [`wright`]: the Mainardi function, oracle for the single-term case.
//! - [`bernstein`]: sampled complete-monotonicity and concavity checks.
//! - [`kernels`]: `w`, `w_t`, `G_c`, `G_s`, `φ`, `ψ`.
//! - [`solver`]: d'Alembert / eigenfunction solvers and Caputo residuals.

pub mod bernstein;
pub mod kernels;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod wright;

pub use num_complex;
pub use kernels::{KernelError, KernelField, KernelKind, KernelValue};
pub use problem::{MultiTermProblem, ProblemError, ProblemSpec, SymbolEval, Term};
pub use quadrature::{QuadratureConfig, QuadratureError, QuadratureResult};
