use serde::{Deserialize, Serialize};

use crate::diagnostics::KktResiduals;
use crate::error::{Error, Result};
use crate::model::{NormEstimateOptions, PrimalDualPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Plain PDHG: no averaging, full extrapolation.
    Pdhg,
    /// Accelerated PDHG with averaging weights `β_k` and extrapolation `θ_k`.
    Apdhg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartPolicy {
    None,
    /// Restart to the running average every `K` inner iterations.
    Fixed(usize),
    /// Restart to the running average once its relKKT halves the epoch start.
    AdaptiveHalving,
    /// Three-condition rule; restarts to the better of current and average.
    PdqpAdaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Horizon-dependent schedule; PDHG uses the constant steps
    /// `η = 1/(‖Q‖+2‖A‖)`, `τ = 1/(2‖A‖)`.
    Theoretical,
    /// Growing step `η` split as `η/ω` (primal) and `ηω` (dual).
    PdqpAdaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimalWeight {
    Fixed(f64),
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub restart: RestartPolicy,
    pub step_rule: StepRule,
    pub primal_weight: PrimalWeight,
    pub tol: f64,
    pub max_iters: usize,
    /// Seconds.
    pub time_limit: f64,
    pub check_interval: usize,
    pub scaling: bool,
    /// Seeds the power iteration used for norm estimates.
    pub seed: u64,
    /// Keep every restart point (unscaled) in the result.
    pub record_restarts: bool,
    /// Replace the estimated `(‖Q‖, ‖A‖)` of the (scaled) problem.
    pub norm_override: Option<(f64, f64)>,
    pub norm_max_iters: usize,
    pub norm_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let norm = NormEstimateOptions::default();
        SolverConfig {
            algorithm: Algorithm::Apdhg,
            restart: RestartPolicy::PdqpAdaptive,
            step_rule: StepRule::PdqpAdaptive,
            primal_weight: PrimalWeight::Adaptive,
            tol: 1e-3,
            max_iters: 200_000,
            time_limit: 3600.0,
            check_interval: 40,
            scaling: true,
            seed: 0,
            record_restarts: false,
            norm_override: None,
            norm_max_iters: norm.max_iters,
            norm_tol: norm.tol,
        }
    }
}

impl SolverConfig {
    /// Restarted accelerated PDHG with the given restart policy and the
    /// adaptive step and weight heuristics.
    pub fn rapdhg(restart: RestartPolicy) -> Self {
        SolverConfig { restart, ..Default::default() }
    }

    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.restart == RestartPolicy::Fixed(0) {
            return Err(Error::InvalidArgument("fixed restart length must be at least 1".into()));
        }
        if self.check_interval == 0 {
            return Err(Error::InvalidArgument("check interval must be at least 1".into()));
        }
        if let PrimalWeight::Fixed(w) = self.primal_weight {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("primal weight must be positive, got {w}")));
            }
        }
        if !(self.time_limit >= 0.0) {
            return Err(Error::InvalidArgument("time limit must be nonnegative".into()));
        }
        Ok(())
    }

    pub(crate) fn norm_options(&self) -> NormEstimateOptions {
        NormEstimateOptions { max_iters: self.norm_max_iters, tol: self.norm_tol, seed: self.seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    IterationLimit,
    TimeLimit,
    NumericalError,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::IterationLimit => "iteration_limit",
            Status::TimeLimit => "time_limit",
            Status::NumericalError => "numerical_error",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the per-check convergence log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub iter: usize,
    pub r_primal: f64,
    pub r_dual: f64,
    pub r_gap: f64,
    pub eta: f64,
    pub omega: f64,
    pub restarted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// Solution in the original (unscaled) variables.
    pub point: PrimalDualPoint,
    /// Residuals of `point` on the original problem.
    pub relkkt: KktResiduals,
    /// Objective of `point`, including the constant term.
    pub objective: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub log: Vec<LogRecord>,
    /// Restart points `z^{n,0}` for `n ≥ 0` (unscaled), when requested.
    pub restart_points: Vec<PrimalDualPoint>,
    pub seconds: f64,
}
