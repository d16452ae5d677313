//! Step-size schedules and primal-weight rules.

use crate::error::{Error, Result};

const EPS_ZERO: f64 = 1e-10;
const PRIMAL_WEIGHT_SMOOTHING: f64 = 0.2;

/// Averaging weight `β`, extrapolation `θ`, primal step `η`, dual step `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub beta: f64,
    pub theta: f64,
    pub eta: f64,
    pub tau: f64,
}

impl StepParams {
    /// Slack of `1/η − ‖Q‖/β − 4‖A‖²τ ≥ 0`.
    pub fn condition_slack(&self, norm_q: f64, norm_a: f64) -> f64 {
        1.0 / self.eta - norm_q / self.beta - 4.0 * norm_a * norm_a * self.tau
    }
}

/// Inner-loop schedule for horizon `K`:
/// `β_k = (k+2)/2`, `θ_k = k/(k+1)`, `η_k = (k+1)/(2(‖Q‖+K‖A‖))`,
/// `τ_k = (k+1)/(2K‖A‖)`.
///
/// When `‖A‖ = 0` the value `‖Q‖/K` stands in for it; the second tuple
/// element reports whether that happened.
pub fn step_schedule_theoretical(k: usize, horizon: usize, norm_q: f64, norm_a: f64) -> (StepParams, bool) {
    let kf = k as f64;
    let big_k = horizon.max(1) as f64;
    let substituted = norm_a <= 0.0;
    let norm_a = if substituted { norm_q / big_k } else { norm_a };
    let params = StepParams {
        beta: (kf + 2.0) / 2.0,
        theta: kf / (kf + 1.0),
        eta: (kf + 1.0) / (2.0 * (norm_q + big_k * norm_a)),
        tau: (kf + 1.0) / (2.0 * big_k * norm_a),
    };
    (params, substituted)
}

/// Constant steps of plain PDHG, `β = θ = 1`.
pub fn pdhg_steps(norm_q: f64, norm_a: f64) -> StepParams {
    let norm_a = if norm_a > 0.0 { norm_a } else { norm_q / 2.0 };
    StepParams { beta: 1.0, theta: 1.0, eta: 1.0 / (norm_q + 2.0 * norm_a), tau: 1.0 / (2.0 * norm_a) }
}

/// Adaptive step scale `η^{n,k}`.
pub fn adaptive_eta(k: usize, prev_eta: f64, norm_q: f64, norm_a: f64, omega: f64) -> Result<f64> {
    if norm_q <= 0.0 && norm_a <= 0.0 {
        return Err(Error::InvalidArgument("adaptive step needs a nonzero Q or A".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument(format!("primal weight must be positive, got {omega}")));
    }
    let q = norm_q / omega;
    if k == 0 {
        return Ok(1.98 / (q + (4.0 * norm_a * norm_a + q * q).sqrt()));
    }
    let kf = k as f64;
    let growth = (1.0 + 1.0 / kf) * prev_eta;
    let cap = 0.99 * (kf + 2.0) / (q + (norm_a * norm_a * (kf + 2.0) * (kf + 2.0) + q * q).sqrt());
    Ok(growth.min(cap))
}

/// `‖c‖₂/‖b‖₂` when both norms exceed `1e-10`, else 1.
pub fn primal_weight_init(c: &[f64], b: &[f64]) -> f64 {
    let (nc, nb) = (norm2(c), norm2(b));
    if nc > EPS_ZERO && nb > EPS_ZERO {
        nc / nb
    } else {
        1.0
    }
}

/// Log-space smoothing of `Δy/Δx` into the previous weight.
pub fn primal_weight_update(delta_x: f64, delta_y: f64, omega_prev: f64) -> f64 {
    if delta_x > EPS_ZERO && delta_y > EPS_ZERO {
        (PRIMAL_WEIGHT_SMOOTHING * (delta_y / delta_x).ln() + (1.0 - PRIMAL_WEIGHT_SMOOTHING) * omega_prev.ln()).exp()
    } else {
        omega_prev
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
