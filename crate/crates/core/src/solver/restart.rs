//! Restart rules.

use super::config::RestartPolicy;
use crate::diagnostics::{rel_kkt, KktResiduals};
use crate::error::Result;
use crate::model::{PrimalDualPoint, QuadraticProgram};

const SUFFICIENT_DECAY: f64 = 0.2;
const NECESSARY_DECAY: f64 = 0.8;
const ARTIFICIAL: f64 = 0.36;

/// relKKT values seen at a restart check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestartMetrics {
    /// Restart candidate (better of current and average).
    pub candidate: f64,
    /// Running average.
    pub average: f64,
    /// First point of the epoch, `z^{n,0}`.
    pub start: f64,
    /// Candidate at the previous check of this epoch.
    pub previous_candidate: Option<f64>,
}

/// Whether to end the current epoch.
///
/// `k` is the inner counter and `total_iters` counts all iterations so far,
/// which is what the long-inner-loop rule compares against.
pub fn restart_decision(policy: RestartPolicy, m: &RestartMetrics, k: usize, total_iters: usize) -> bool {
    match policy {
        RestartPolicy::None => false,
        RestartPolicy::Fixed(len) => k >= len,
        RestartPolicy::AdaptiveHalving => m.average <= 0.5 * m.start,
        RestartPolicy::PdqpAdaptive => {
            let sufficient = m.candidate <= SUFFICIENT_DECAY * m.start;
            let necessary = m.candidate <= NECESSARY_DECAY * m.start
                && m.previous_candidate.is_some_and(|prev| m.candidate > prev);
            let artificial = k as f64 >= ARTIFICIAL * total_iters as f64;
            sufficient || necessary || artificial
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Current,
    Average,
}

/// The current iterate wins only with a strictly smaller relKKT.
pub fn choose_candidate(current: &KktResiduals, average: &KktResiduals) -> Candidate {
    if current.relkkt < average.relkkt {
        Candidate::Current
    } else {
        Candidate::Average
    }
}

/// Returns whichever of `current` and `average` has the smaller relKKT on
/// `p`, preferring the average on ties.
pub fn get_restart_candidate(
    current: &PrimalDualPoint,
    average: &PrimalDualPoint,
    p: &QuadraticProgram,
) -> Result<PrimalDualPoint> {
    let choice = choose_candidate(&rel_kkt(p, current)?, &rel_kkt(p, average)?);
    Ok(match choice {
        Candidate::Current => current.clone(),
        Candidate::Average => average.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SparseMatrix;

    fn metrics(candidate: f64, start: f64, previous_candidate: Option<f64>) -> RestartMetrics {
        RestartMetrics { candidate, average: candidate, start, previous_candidate }
    }

    #[test]
    fn pdqp_conditions() {
        let p = RestartPolicy::PdqpAdaptive;
        assert!(restart_decision(p, &metrics(0.1, 1.0, None), 10, 1000));
        assert!(restart_decision(p, &metrics(0.5, 1.0, Some(0.4)), 10, 1000));
        assert!(!restart_decision(p, &metrics(0.5, 1.0, Some(0.6)), 10, 1000));
        assert!(!restart_decision(p, &metrics(0.5, 1.0, None), 10, 1000));
        assert!(!restart_decision(p, &metrics(0.9, 1.0, Some(0.4)), 10, 1000));
        assert!(restart_decision(p, &metrics(0.9, 1.0, None), 360, 1000));
        assert!(!restart_decision(p, &metrics(0.9, 1.0, None), 359, 1000));
    }

    #[test]
    fn halving_and_fixed() {
        let h = RestartPolicy::AdaptiveHalving;
        assert!(!restart_decision(h, &metrics(0.51, 1.0, None), 5, 5));
        assert!(restart_decision(h, &metrics(0.5, 1.0, None), 5, 5));
        let f = RestartPolicy::Fixed(7);
        assert!(!restart_decision(f, &metrics(0.0, 1.0, None), 6, 100));
        assert!(restart_decision(f, &metrics(1.0, 1.0, None), 7, 100));
        assert!(!restart_decision(RestartPolicy::None, &metrics(0.0, 1.0, None), 1000, 1000));
    }

    #[test]
    fn candidate_choice() {
        let p = QuadraticProgram::with_inequalities(
            "1d",
            SparseMatrix::diagonal(&[2.0]),
            vec![-2.0],
            SparseMatrix::identity(1),
            vec![0.5],
        )
        .unwrap();
        let star = PrimalDualPoint { x: vec![0.5], y_ineq: vec![1.0], y_eq: vec![] };
        let off = PrimalDualPoint { x: vec![0.0], y_ineq: vec![0.0], y_eq: vec![] };
        assert_eq!(get_restart_candidate(&star, &off, &p).unwrap(), star);
        assert_eq!(get_restart_candidate(&off, &star, &p).unwrap(), star);
        let star2 = PrimalDualPoint { x: vec![0.5], y_ineq: vec![1.0 + 0.0], y_eq: vec![] };
        // both optimal: average wins
        let avg = get_restart_candidate(&star, &star2, &p).unwrap();
        assert_eq!(avg, star2);
        let r = |v: f64| KktResiduals::new(v, 0.0, 0.0);
        assert_eq!(choose_candidate(&r(0.3), &r(0.4)), Candidate::Current);
        assert_eq!(choose_candidate(&r(0.4), &r(0.4)), Candidate::Average);
    }
}
