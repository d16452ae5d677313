use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dot, PrimalDualPoint, QuadraticProgram, SparseMatrix};

/// Relative KKT residuals of a primal-dual point. `relkkt` is the max of the
/// three components and is the solver's termination metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub r_primal: f64,
    pub r_dual: f64,
    pub r_gap: f64,
    pub relkkt: f64,
}

impl KktResiduals {
    pub fn new(r_primal: f64, r_dual: f64, r_gap: f64) -> Self {
        // NaN must not hide behind f64::max.
        let relkkt = if r_primal.is_nan() || r_dual.is_nan() || r_gap.is_nan() {
            f64::NAN
        } else {
            r_primal.max(r_dual).max(r_gap)
        };
        KktResiduals { r_primal, r_dual, r_gap, relkkt }
    }
}

/// Evaluates relative KKT residuals against fixed problem data. Holds the
/// stacked constraint matrix so repeated evaluations avoid rebuilding it.
#[derive(Debug, Clone)]
pub struct KktEvaluator<'a> {
    problem: &'a QuadraticProgram,
    a: SparseMatrix,
    b: Vec<f64>,
    b_inf: f64,
    c_inf: f64,
    // scratch
    ax: Vec<f64>,
    aty: Vec<f64>,
    qx: Vec<f64>,
}

impl<'a> KktEvaluator<'a> {
    pub fn new(problem: &'a QuadraticProgram) -> Self {
        let (a, b) = problem.stacked_constraints();
        let b_inf = inf_norm(&b);
        let c_inf = inf_norm(&problem.c);
        KktEvaluator {
            problem,
            ax: vec![0.0; a.n_rows()],
            aty: vec![0.0; a.n_cols()],
            qx: vec![0.0; problem.n()],
            a,
            b,
            b_inf,
            c_inf,
        }
    }

    /// Residuals at `(x, y)` with `y` stacked as `[y_ineq; y_eq]`. No sign
    /// check is made on `y`.
    pub fn evaluate(&mut self, x: &[f64], y: &[f64]) -> KktResiduals {
        let m_ineq = self.problem.m_ineq();
        self.a.spmv_into(x, &mut self.ax);
        self.a.spmv_t_into(y, &mut self.aty);
        self.problem.q.spmv_into(x, &mut self.qx);

        let mut primal_viol = 0.0f64;
        for (i, (ax, b)) in self.ax.iter().zip(&self.b).enumerate() {
            let r = ax - b;
            let v = if i < m_ineq { r.max(0.0) } else { r.abs() };
            primal_viol = primal_viol.max(v);
        }
        let r_primal = primal_viol / (1.0 + inf_norm(&self.ax).max(self.b_inf));

        let mut dual_viol = 0.0f64;
        for j in 0..x.len() {
            dual_viol = dual_viol.max((self.qx[j] + self.aty[j] + self.problem.c[j]).abs());
        }
        let r_dual = dual_viol / (1.0 + inf_norm(&self.qx).max(inf_norm(&self.aty)).max(self.c_inf));

        let xqx = dot(x, &self.qx);
        let cx = dot(&self.problem.c, x);
        let by = dot(&self.b, y);
        let primal_obj = 0.5 * xqx + cx;
        let dual_obj_abs = (0.5 * xqx + by).abs();
        let r_gap = (xqx + cx + by).abs() / (1.0 + primal_obj.abs().max(dual_obj_abs));

        KktResiduals::new(r_primal, r_dual, r_gap)
    }
}

/// Relative KKT error of `z` on `p`.
///
/// Inequality duals must be nonnegative (within `1e-9`); equality rows
/// contribute `|A_eq x − b_eq|` to the primal residual.
pub fn rel_kkt(p: &QuadraticProgram, z: &PrimalDualPoint) -> Result<KktResiduals> {
    z.check_dims(p)?;
    if let Some((index, &value)) = z.y_ineq.iter().enumerate().find(|(_, v)| **v < -1e-9) {
        return Err(Error::NegativeDual { index, value });
    }
    Ok(KktEvaluator::new(p).evaluate(&z.x, &z.stacked_y()))
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_dim() -> QuadraticProgram {
        QuadraticProgram::with_inequalities(
            "1d",
            SparseMatrix::diagonal(&[2.0]),
            vec![-2.0],
            SparseMatrix::identity(1),
            vec![0.5],
        )
        .unwrap()
    }

    fn pt(x: f64, y: f64) -> PrimalDualPoint {
        PrimalDualPoint { x: vec![x], y_ineq: vec![y], y_eq: vec![] }
    }

    #[test]
    fn optimum_has_zero_residuals() {
        let r = rel_kkt(&one_dim(), &pt(0.5, 1.0)).unwrap();
        assert_eq!((r.r_primal, r.r_dual, r.r_gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn origin_residuals() {
        let r = rel_kkt(&one_dim(), &pt(0.0, 0.0)).unwrap();
        assert_eq!(r.r_primal, 0.0);
        assert!((r.r_dual - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.r_gap, 0.0);
        assert!((r.relkkt - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn all_zero_problem() {
        let p = QuadraticProgram::with_inequalities(
            "zero",
            SparseMatrix::zeros(2, 2),
            vec![0.0; 2],
            SparseMatrix::zeros(1, 2),
            vec![0.0],
        )
        .unwrap();
        let z = PrimalDualPoint { x: vec![1.5, -2.0], y_ineq: vec![3.0], y_eq: vec![] };
        let r = rel_kkt(&p, &z).unwrap();
        assert_eq!(r.relkkt, 0.0);
    }

    #[test]
    fn negative_dual_rejected() {
        assert!(matches!(rel_kkt(&one_dim(), &pt(0.0, -1.0)), Err(Error::NegativeDual { .. })));
    }

    #[test]
    fn equality_rows_count_both_signs() {
        let p = QuadraticProgram::new(
            "eq",
            SparseMatrix::zeros(1, 1),
            vec![0.0],
            SparseMatrix::zeros(0, 1),
            vec![],
            SparseMatrix::identity(1),
            vec![1.0],
        )
        .unwrap();
        let z = PrimalDualPoint { x: vec![0.0], y_ineq: vec![], y_eq: vec![0.0] };
        // |0 − 1| / (1 + max(0, 1))
        assert!((rel_kkt(&p, &z).unwrap().r_primal - 0.5).abs() < 1e-15);
    }
}
