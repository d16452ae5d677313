//! Problem representation, sparse kernels and operator-norm estimation.

mod canonical;
mod norm;
mod problem;
mod sparse;

pub use canonical::{canonicalize, CanonicalMap, RowOrigin, RowSource};
pub use norm::{estimate_op_norm, NormEstimateOptions, NORM_SAFETY_FACTOR};
pub use problem::{PrimalDualPoint, QuadraticProgram, RawProblem};
pub(crate) use problem::dot;
pub use sparse::SparseMatrix;
