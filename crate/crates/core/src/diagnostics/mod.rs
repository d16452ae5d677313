//! Progress metrics and theory-side checks.
//!
//! [`rel_kkt`] is the solver's termination metric and runs on every check.
//! The gap and residual routines in [`gap`] use dense algebra and are meant
//! for tests and small instances.

pub mod dense;
pub mod gap;
pub mod kkt;

pub use dense::{symmetric_eigenvalues, symmetric_norm, to_dense, DENSE_CAP};
pub use gap::{
    residual_bound_check, scaled_kkt_residual, smoothed_gap_bruteforce, smoothed_gap_closed, BoundCheck,
    ResidualBoundReport, SmoothedGapParams, BRUTEFORCE_CAP,
};
pub use kkt::{rel_kkt, KktEvaluator, KktResiduals};
