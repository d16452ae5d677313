//! The unified PDHG / accelerated PDHG inner iteration.

use super::steps::StepParams;
use crate::model::{PrimalDualPoint, QuadraticProgram, SparseMatrix};

/// Problem data laid out for the iteration: `A = [A_ineq; A_eq]` stacked,
/// duals of the first `m_ineq` rows projected onto `y ≥ 0`.
#[derive(Debug, Clone)]
pub struct Operator {
    pub q: SparseMatrix,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub m_ineq: usize,
}

impl Operator {
    pub fn new(p: &QuadraticProgram) -> Self {
        let (a, b) = p.stacked_constraints();
        Operator { q: p.q.clone(), a, b, c: p.c.clone(), m_ineq: p.m_ineq() }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }
}

/// `(x, x_prev, y, x̄, ȳ, k, n)` plus scratch space.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub y: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub y_bar: Vec<f64>,
    /// Inner counter.
    pub k: usize,
    /// Outer counter.
    pub n: usize,
    m_ineq: usize,
    x_ext: Vec<f64>,
    x_md: Vec<f64>,
    ax: Vec<f64>,
    aty: Vec<f64>,
    qx: Vec<f64>,
}

impl IterateState {
    /// Fresh epoch at `(x, y)` with `y` stacked `[y_ineq; y_eq]`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, m_ineq: usize) -> Self {
        let (n, m) = (x.len(), y.len());
        IterateState {
            x_prev: x.clone(),
            x_bar: x.clone(),
            y_bar: y.clone(),
            x,
            y,
            k: 0,
            n: 0,
            m_ineq,
            x_ext: vec![0.0; n],
            x_md: vec![0.0; n],
            ax: vec![0.0; m],
            aty: vec![0.0; n],
            qx: vec![0.0; n],
        }
    }

    pub fn zeros(op: &Operator) -> Self {
        Self::new(vec![0.0; op.n()], vec![0.0; op.m()], op.m_ineq)
    }

    /// Starts a new epoch at `(x, y)`: averages reset, `x_prev = x`, `k = 0`.
    pub fn restart_at(&mut self, x: &[f64], y: &[f64]) {
        self.x.copy_from_slice(x);
        self.x_prev.copy_from_slice(x);
        self.x_bar.copy_from_slice(x);
        self.y.copy_from_slice(y);
        self.y_bar.copy_from_slice(y);
        self.k = 0;
        self.n += 1;
    }

    pub fn current(&self) -> PrimalDualPoint {
        PrimalDualPoint::from_stacked(self.x.clone(), &self.y, self.m_ineq)
    }

    pub fn average(&self) -> PrimalDualPoint {
        PrimalDualPoint::from_stacked(self.x_bar.clone(), &self.y_bar, self.m_ineq)
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).chain(&self.x_bar).chain(&self.y_bar).all(|v| v.is_finite())
    }
}

/// One inner iteration:
///
/// ```text
/// x_md = (1 − 1/β) x̄ + x/β
/// y⁺   = Π(y + τ(A(θ(x − x_prev) + x) − b))
/// x⁺   = x − η(Q x_md + c + Aᵀy⁺)
/// x̄⁺   = (1 − 1/β) x̄ + x⁺/β,  ȳ⁺ likewise
/// ```
///
/// `Π` clamps the inequality block at zero and leaves equality duals free.
pub fn inner_step(s: &mut IterateState, op: &Operator, sp: &StepParams) {
    let inv_beta = 1.0 / sp.beta;
    let keep = 1.0 - inv_beta;
    for j in 0..s.x.len() {
        s.x_md[j] = keep * s.x_bar[j] + inv_beta * s.x[j];
        s.x_ext[j] = sp.theta * (s.x[j] - s.x_prev[j]) + s.x[j];
    }

    op.a.spmv_into(&s.x_ext, &mut s.ax);
    for i in 0..s.y.len() {
        let v = s.y[i] + sp.tau * (s.ax[i] - op.b[i]);
        s.y[i] = if i < s.m_ineq { v.max(0.0) } else { v };
        s.y_bar[i] = keep * s.y_bar[i] + inv_beta * s.y[i];
    }

    op.a.spmv_t_into(&s.y, &mut s.aty);
    op.q.spmv_into(&s.x_md, &mut s.qx);
    for j in 0..s.x.len() {
        let next = s.x[j] - sp.eta * (s.qx[j] + op.c[j] + s.aty[j]);
        s.x_prev[j] = s.x[j];
        s.x[j] = next;
        s.x_bar[j] = keep * s.x_bar[j] + inv_beta * next;
    }
    s.k += 1;
}

/// Plain PDHG step: [`inner_step`] with `β = θ = 1`.
pub fn pdhg_step(s: &mut IterateState, op: &Operator, eta: f64, tau: f64) {
    inner_step(s, op, &StepParams { beta: 1.0, theta: 1.0, eta, tau });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::steps::step_schedule_theoretical;

    fn one_dim() -> Operator {
        Operator::new(
            &QuadraticProgram::with_inequalities(
                "1d",
                SparseMatrix::diagonal(&[2.0]),
                vec![-2.0],
                SparseMatrix::identity(1),
                vec![0.5],
            )
            .unwrap(),
        )
    }

    #[test]
    fn first_accelerated_step_by_hand() {
        let op = one_dim();
        let mut s = IterateState::zeros(&op);
        let (sp, _) = step_schedule_theoretical(0, 10, 2.0, 1.0);
        inner_step(&mut s, &op, &sp);
        assert!((s.x[0] - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(s.y[0], 0.0);
        assert_eq!(s.x_bar, s.x);
        assert_eq!(s.y_bar, s.y);
        assert_eq!((s.x_prev[0], s.k), (0.0, 1));
    }

    #[test]
    fn optimum_is_a_fixed_point() {
        let op = one_dim();
        let mut s = IterateState::new(vec![0.5], vec![1.0], 1);
        for k in 0..10 {
            let (sp, _) = step_schedule_theoretical(k, 10, 2.0, 1.0);
            inner_step(&mut s, &op, &sp);
            assert!((s.x[0] - 0.5).abs() < 1e-14 && (s.y[0] - 1.0).abs() < 1e-14);
        }
        let mut s = IterateState::new(vec![0.5], vec![1.0], 1);
        pdhg_step(&mut s, &op, 0.25, 0.5);
        assert_eq!((s.x[0], s.y[0]), (0.5, 1.0));
    }

    #[test]
    fn pdhg_step_by_hand() {
        let op = one_dim();
        let mut s = IterateState::zeros(&op);
        pdhg_step(&mut s, &op, 0.25, 0.5);
        assert_eq!((s.x[0], s.y[0]), (0.5, 0.0));
        assert_eq!((s.x_bar[0], s.y_bar[0]), (0.5, 0.0));
    }

    #[test]
    fn pdhg_extrapolates_with_unit_theta() {
        // A = I, b = 0, Q = 0, c = 0: y⁺ = y + τ(2x − x_prev)
        let p = QuadraticProgram::new(
            "e",
            SparseMatrix::zeros(1, 1),
            vec![0.0],
            SparseMatrix::zeros(0, 1),
            vec![],
            SparseMatrix::identity(1),
            vec![0.0],
        )
        .unwrap();
        let op = Operator::new(&p);
        let mut s = IterateState::new(vec![3.0], vec![0.0], 0);
        s.x_prev = vec![1.0];
        pdhg_step(&mut s, &op, 0.1, 1.0);
        assert_eq!(s.y[0], 5.0);
    }

    #[test]
    fn equality_duals_stay_free() {
        let p = QuadraticProgram::new(
            "e",
            SparseMatrix::zeros(1, 1),
            vec![0.0],
            SparseMatrix::zeros(0, 1),
            vec![],
            SparseMatrix::identity(1),
            vec![1.0],
        )
        .unwrap();
        let op = Operator::new(&p);
        let mut s = IterateState::zeros(&op);
        pdhg_step(&mut s, &op, 0.1, 1.0);
        assert_eq!(s.y[0], -1.0);
    }
}
