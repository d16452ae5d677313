use std::time::Instant;

use log::{debug, warn};

use super::config::{Algorithm, LogRecord, PrimalWeight, RestartPolicy, SolveResult, SolverConfig, Status, StepRule};
use super::iterate::{inner_step, IterateState, Operator};
use super::restart::{choose_candidate, restart_decision, Candidate, RestartMetrics};
use super::steps::{
    adaptive_eta, norm2, pdhg_steps, primal_weight_init, primal_weight_update, step_schedule_theoretical, StepParams,
};
use crate::diagnostics::{KktEvaluator, KktResiduals};
use crate::error::Result;
use crate::model::{estimate_op_norm, PrimalDualPoint, QuadraticProgram, NORM_SAFETY_FACTOR};
use crate::scaling::{apply_scaling, compute_scaling, ScalingInfo};

/// A point of the working (scaled) problem together with its residuals on
/// the original problem.
#[derive(Clone)]
struct Evaluated {
    x: Vec<f64>,
    y: Vec<f64>,
    kkt: KktResiduals,
}

struct Evaluator<'a> {
    kkt: KktEvaluator<'a>,
    scaling: ScalingInfo,
    x_buf: Vec<f64>,
    y_buf: Vec<f64>,
}

impl Evaluator<'_> {
    fn eval(&mut self, x: &[f64], y: &[f64]) -> Evaluated {
        for (o, (v, d)) in self.x_buf.iter_mut().zip(x.iter().zip(&self.scaling.d2)) {
            *o = v * d;
        }
        for (o, (v, d)) in self.y_buf.iter_mut().zip(y.iter().zip(&self.scaling.d1)) {
            *o = v * d;
        }
        let kkt = self.kkt.evaluate(&self.x_buf, &self.y_buf);
        Evaluated { x: x.to_vec(), y: y.to_vec(), kkt }
    }

    fn unscale(&self, x: &[f64], y: &[f64], m_ineq: usize) -> PrimalDualPoint {
        let ux = x.iter().zip(&self.scaling.d2).map(|(v, d)| v * d).collect();
        let uy: Vec<f64> = y.iter().zip(&self.scaling.d1).map(|(v, d)| v * d).collect();
        PrimalDualPoint::from_stacked(ux, &uy, m_ineq)
    }
}

/// Step sizes for one epoch, with the adaptive scale carried across `k`.
struct StepController {
    algorithm: Algorithm,
    rule: StepRule,
    horizon: usize,
    norm_q: f64,
    norm_a: f64,
    eta: f64,
}

impl StepController {
    fn params(&mut self, k: usize, omega: f64) -> StepParams {
        match (self.algorithm, self.rule) {
            (Algorithm::Apdhg, StepRule::Theoretical) => {
                let sp = step_schedule_theoretical(k, self.horizon, self.norm_q, self.norm_a).0;
                self.eta = sp.eta;
                sp
            }
            (Algorithm::Pdhg, StepRule::Theoretical) => {
                let sp = pdhg_steps(self.norm_q, self.norm_a);
                self.eta = sp.eta;
                sp
            }
            (Algorithm::Apdhg, StepRule::PdqpAdaptive) => {
                self.eta = adaptive_eta(k, self.eta, self.norm_q, self.norm_a, omega).expect("nonzero norms");
                let kf = k as f64;
                StepParams { beta: (kf + 2.0) / 2.0, theta: kf / (kf + 1.0), eta: self.eta / omega, tau: self.eta * omega }
            }
            (Algorithm::Pdhg, StepRule::PdqpAdaptive) => {
                self.eta = adaptive_eta(0, 0.0, self.norm_q, self.norm_a, omega).expect("nonzero norms");
                StepParams { beta: 1.0, theta: 1.0, eta: self.eta / omega, tau: self.eta * omega }
            }
        }
    }
}

/// Solves `p` with the configured variant.
///
/// The iteration runs on the preconditioned problem when `cfg.scaling` is
/// set, but every termination and restart test evaluates relKKT of the
/// unscaled point on the original problem. Limits return the best point
/// seen so far.
pub fn solve(p: &QuadraticProgram, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    p.validate()?;
    let started = Instant::now();

    let scaling = if cfg.scaling { compute_scaling(p) } else { ScalingInfo::identity(p) };
    let work = if cfg.scaling { apply_scaling(p, &scaling)? } else { p.clone() };
    let op = Operator::new(&work);
    let m_ineq = p.m_ineq();

    let (norm_q, norm_a) = match cfg.norm_override {
        Some(pair) => pair,
        None => {
            let opts = cfg.norm_options();
            (
                NORM_SAFETY_FACTOR * estimate_op_norm(&op.q, &opts),
                NORM_SAFETY_FACTOR * estimate_op_norm(&op.a, &opts),
            )
        }
    };
    debug!("{}: ‖Q‖ ≈ {norm_q:.6e}, ‖A‖ ≈ {norm_a:.6e}", p.name);

    let mut ev = Evaluator {
        kkt: KktEvaluator::new(p),
        scaling,
        x_buf: vec![0.0; p.n()],
        y_buf: vec![0.0; p.m()],
    };

    let mut state = IterateState::zeros(&op);
    let mut omega = match cfg.primal_weight {
        PrimalWeight::Fixed(w) => w,
        PrimalWeight::Adaptive => primal_weight_init(&op.c, &op.b),
    };
    let horizon = match (cfg.step_rule, cfg.restart) {
        (StepRule::Theoretical, RestartPolicy::Fixed(len)) => len,
        _ => cfg.max_iters.max(1),
    };
    if cfg.algorithm == Algorithm::Apdhg && cfg.step_rule == StepRule::Theoretical && norm_a <= 0.0 {
        warn!("{}: ‖A‖ = 0, substituting ‖Q‖/K in the step schedule", p.name);
    }
    let mut steps = StepController { algorithm: cfg.algorithm, rule: cfg.step_rule, horizon, norm_q, norm_a, eta: 0.0 };

    let mut start = ev.eval(&state.x, &state.y);
    let mut best = start.clone();
    let mut log = Vec::new();
    let mut restart_points = Vec::new();
    if cfg.record_restarts {
        restart_points.push(ev.unscale(&start.x, &start.y, m_ineq));
    }
    let mut restarts = 0usize;
    let mut total = 0usize;

    let finish = |status: Status, pt: &Evaluated, ev: &Evaluator, total, restarts, log, restart_points| {
        let point = ev.unscale(&pt.x, &pt.y, m_ineq);
        SolveResult {
            status,
            objective: p.objective(&point.x),
            point,
            relkkt: pt.kkt,
            iterations: total,
            restarts,
            log,
            restart_points,
            seconds: started.elapsed().as_secs_f64(),
        }
    };

    if start.kkt.relkkt <= cfg.tol {
        return Ok(finish(Status::Optimal, &start, &ev, 0, 0, log, restart_points));
    }
    if cfg.max_iters == 0 || (norm_q <= 0.0 && norm_a <= 0.0) {
        return Ok(finish(Status::IterationLimit, &start, &ev, 0, 0, log, restart_points));
    }

    let mut previous_candidate: Option<f64> = None;
    loop {
        let sp = steps.params(state.k, omega);
        inner_step(&mut state, &op, &sp);
        total += 1;

        let forced = state.k >= horizon;
        let at_limit = total >= cfg.max_iters;
        if !(total % cfg.check_interval == 0 || forced || at_limit) {
            continue;
        }

        if !state.is_finite() {
            return Ok(finish(Status::NumericalError, &best, &ev, total, restarts, log, restart_points));
        }
        let current = ev.eval(&state.x, &state.y);
        let average = ev.eval(&state.x_bar, &state.y_bar);
        if current.kkt.relkkt.is_nan() || average.kkt.relkkt.is_nan() {
            return Ok(finish(Status::NumericalError, &best, &ev, total, restarts, log, restart_points));
        }
        let candidate = match choose_candidate(&current.kkt, &average.kkt) {
            Candidate::Current => current,
            Candidate::Average => average.clone(),
        };
        if candidate.kkt.relkkt < best.kkt.relkkt {
            best = candidate.clone();
        }

        let mut record = LogRecord {
            iter: total,
            r_primal: candidate.kkt.r_primal,
            r_dual: candidate.kkt.r_dual,
            r_gap: candidate.kkt.r_gap,
            eta: steps.eta,
            omega,
            restarted: false,
        };

        if candidate.kkt.relkkt <= cfg.tol {
            log.push(record);
            return Ok(finish(Status::Optimal, &candidate, &ev, total, restarts, log, restart_points));
        }
        if at_limit {
            log.push(record);
            return Ok(finish(Status::IterationLimit, &best, &ev, total, restarts, log, restart_points));
        }
        if started.elapsed().as_secs_f64() > cfg.time_limit {
            log.push(record);
            return Ok(finish(Status::TimeLimit, &best, &ev, total, restarts, log, restart_points));
        }

        let metrics = RestartMetrics {
            candidate: candidate.kkt.relkkt,
            average: average.kkt.relkkt,
            start: start.kkt.relkkt,
            previous_candidate,
        };
        if forced || restart_decision(cfg.restart, &metrics, state.k, total) {
            let target = match cfg.restart {
                RestartPolicy::PdqpAdaptive => candidate,
                _ => average,
            };
            if cfg.primal_weight == PrimalWeight::Adaptive {
                let dx = norm2_diff(&target.x, &start.x);
                let dy = norm2_diff(&target.y, &start.y);
                omega = primal_weight_update(dx, dy, omega);
            }
            state.restart_at(&target.x, &target.y);
            if cfg.record_restarts {
                restart_points.push(ev.unscale(&target.x, &target.y, m_ineq));
            }
            restarts += 1;
            previous_candidate = None;
            start = target;
            record.restarted = true;
        } else {
            previous_candidate = Some(metrics.candidate);
        }
        log.push(record);
    }
}

fn norm2_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
    norm2(&d)
}
