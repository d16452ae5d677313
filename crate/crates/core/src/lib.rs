//! Restarted accelerated primal-dual hybrid gradient (rAPDHG) for convex
//! quadratic programs.
//!
//! The solver is matrix-free: every iteration costs a handful of sparse
//! matrix-vector products and no linear systems are ever factored. Around the
//! core iteration the crate provides diagonal preconditioning, KKT-based
//! termination, a QPS reader/writer, synthetic instance generators and a
//! benchmarking harness.

pub mod bench;
pub mod diagnostics;
pub mod error;
pub mod generators;
pub mod model;
pub mod qps;
pub mod scaling;
pub mod solver;

pub use error::{Error, Result};
pub use model::{PrimalDualPoint, QuadraticProgram, RawProblem, SparseMatrix};
