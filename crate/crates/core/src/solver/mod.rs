//! Restarted (accelerated) PDHG.
//!
//! Four variants share one loop: PDHG or accelerated PDHG, each with or
//! without restarts. Step sizes follow either the horizon-based schedule or
//! the adaptive rule with a primal weight `ω`.

mod config;
mod driver;
mod iterate;
mod restart;
mod steps;

pub use config::{Algorithm, LogRecord, PrimalWeight, RestartPolicy, SolveResult, SolverConfig, Status, StepRule};
pub use driver::solve;
pub use iterate::{inner_step, pdhg_step, IterateState, Operator};
pub use restart::{choose_candidate, get_restart_candidate, restart_decision, Candidate, RestartMetrics};
pub use steps::{
    adaptive_eta, pdhg_steps, primal_weight_init, primal_weight_update, step_schedule_theoretical, StepParams,
};
