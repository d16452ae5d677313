//! QPS input and output.
//!
//! QPS is free-format MPS with an extra quadratic section. Conventions:
//!
//! * `QUADOBJ` entries are coefficients of `Q` in `½xᵀQx` and list the lower
//!   triangle only; `QMATRIX` lists the full matrix. Some tools (OSQP, CPLEX
//!   LP files) use other conventions.
//! * The RHS of the objective row is the negated objective constant.
//! * `RANGES` follow MPS: on `L` rows `[b − |r|, b]`, on `G` rows
//!   `[b, b + |r|]`, on `E` rows `[b, b + r]` for `r ≥ 0` and `[b + r, b]`
//!   otherwise.
//! * Columns default to `x ≥ 0`; `UP` with a negative value on a column
//!   whose lower bound is still the default makes it `x ≤ u` with no lower
//!   bound.
//! * Only minimization is accepted. Integer markers are skipped, integer
//!   bound types are rejected.

mod reader;
mod writer;

use std::path::Path;

pub use reader::parse_qps;
pub use writer::write_qps;

use crate::error::Result;
use crate::model::{canonicalize, QuadraticProgram};

/// Reads and canonicalizes a QPS file.
pub fn read_qps_file(path: impl AsRef<Path>) -> Result<QuadraticProgram> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let raw = parse_qps(&text)?;
    let (mut qp, _) = canonicalize(&raw)?;
    if qp.name.is_empty() {
        qp.name = path.as_ref().file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    Ok(qp)
}

/// Parses and canonicalizes QPS text.
pub fn parse_qps_canonical(text: &str) -> Result<QuadraticProgram> {
    Ok(canonicalize(&parse_qps(text)?)?.0)
}
