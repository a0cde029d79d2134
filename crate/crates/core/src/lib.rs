//! Composite optimization with diagonal variable metrics.
//!
//! The library solves `min F(x) = f(x) + g(x)` where `f` is smooth with a
//! cheap positive Hessian diagonal and `g` is a (possibly nonconvex)
//! separable-prox-friendly penalty. It provides:
//!
//! - closed-form diagonal-scaled proximal operators for the l1, capped-l1,
//!   and trimmed-l1 penalties ([`prox`]);
//! - quadratic, least-squares, and logistic-ridge objectives ([`objectives`]);
//! - Newton-metric and secant-metric proximal descent solvers plus an
//!   accelerated baseline ([`solvers`]);
//! - seeded synthetic instance generators and dataset loading ([`datagen`]);
//! - rate-envelope and curvature diagnostics ([`diagnostics`]);
//! - slow brute-force reference oracles for validation ([`oracle`]).
//!
//! Construction-time validation returns `Result`; hot-path dimension or
//! finiteness violations panic, matching the underlying linear algebra.

pub mod datagen;
pub mod diagnostics;
pub mod objectives;
pub mod oracle;
pub mod problem;
pub mod prox;
pub mod solvers;

pub use problem::{
    DiagonalMetric, ProblemError, ProblemInstance, Regularizer, SmoothObjective, Vector,
};
pub use prox::TiePolicy;
pub use solvers::{IterationRecord, SolveResult, SolveStatus, SolverKind};
