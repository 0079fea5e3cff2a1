//! Coordinate-descent solvers for full-column-rank linear least squares.
//!
//! Three column-selection rules share one iteration loop:
//!
//! * greedy Gauss-Seidel (GGS): take the columns where `|A_j^T r|` is
//!   largest, then among those the one maximizing `|A_j^T r|^2 / ||A_j||^2`;
//! * greedy randomized coordinate descent (GRCD): threshold the normalized
//!   gradient entries adaptively and sample among the survivors;
//! * randomized Gauss-Seidel (RGS): sample columns proportionally to their
//!   squared norms.
//!
//! Alongside the solvers the crate evaluates the linear-convergence bounds
//! for GGS against recorded traces, builds the Gaussian and MatrixMarket test
//! problems, and runs repeated-trial benchmarks.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bench;
pub mod error;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::{ColumnMatrix, DenseMatrix, Matrix, SparseMatrix};
pub use problems::LsqProblem;
pub use solvers::{solve, Method, SolveReport, SolverConfig, StopReason};
