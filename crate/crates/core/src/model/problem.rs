use serde::{Deserialize, Serialize};

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// Convex QP in the solver's canonical form:
///
/// ```text
/// minimize    ½ xᵀQx + cᵀx + objective_constant
/// subject to  A_ineq x ≤ b_ineq
///             A_eq   x = b_eq
/// ```
///
/// Inequality rows carry duals constrained to be nonnegative; equality rows
/// carry free duals.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProgram {
    pub name: String,
    pub q: SparseMatrix,
    pub c: Vec<f64>,
    pub a_ineq: SparseMatrix,
    pub b_ineq: Vec<f64>,
    pub a_eq: SparseMatrix,
    pub b_eq: Vec<f64>,
    pub objective_constant: f64,
    /// Optional column names, used when writing QPS files.
    pub var_names: Option<Vec<String>>,
}

impl QuadraticProgram {
    /// Validating constructor. Accepts an empty `Q`-free problem by passing a
    /// zero matrix.
    pub fn new(
        name: impl Into<String>,
        q: SparseMatrix,
        c: Vec<f64>,
        a_ineq: SparseMatrix,
        b_ineq: Vec<f64>,
        a_eq: SparseMatrix,
        b_eq: Vec<f64>,
    ) -> Result<Self> {
        let p = QuadraticProgram {
            name: name.into(),
            q,
            c,
            a_ineq,
            b_ineq,
            a_eq,
            b_eq,
            objective_constant: 0.0,
            var_names: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Problem with inequality rows only, the `Ax ≤ b` case.
    pub fn with_inequalities(
        name: impl Into<String>,
        q: SparseMatrix,
        c: Vec<f64>,
        a: SparseMatrix,
        b: Vec<f64>,
    ) -> Result<Self> {
        let n = c.len();
        Self::new(name, q, c, a, b, SparseMatrix::zeros(0, n), Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.c.len();
        let dims = [
            ("Q rows", self.q.n_rows(), n),
            ("Q cols", self.q.n_cols(), n),
            ("A_ineq cols", self.a_ineq.n_cols(), n),
            ("A_ineq rows", self.a_ineq.n_rows(), self.b_ineq.len()),
            ("A_eq cols", self.a_eq.n_cols(), n),
            ("A_eq rows", self.a_eq.n_rows(), self.b_eq.len()),
        ];
        for (what, got, want) in dims {
            if got != want {
                return Err(Error::Dimension(format!("{what}: got {got}, expected {want}")));
            }
        }
        if let Some(names) = &self.var_names {
            if names.len() != n {
                return Err(Error::Dimension(format!("{} variable names for {n} variables", names.len())));
            }
        }
        for (what, v) in [("c", &self.c), ("b_ineq", &self.b_ineq), ("b_eq", &self.b_eq)] {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(what.to_string()));
            }
        }
        if !self.objective_constant.is_finite() {
            return Err(Error::NonFinite("objective constant".into()));
        }
        if !self.q.is_symmetric(1e-12) {
            return Err(Error::InvalidArgument("objective matrix Q is not symmetric".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m_ineq(&self) -> usize {
        self.b_ineq.len()
    }

    pub fn m_eq(&self) -> usize {
        self.b_eq.len()
    }

    pub fn m(&self) -> usize {
        self.m_ineq() + self.m_eq()
    }

    /// `[A_ineq; A_eq]` and `[b_ineq; b_eq]`; the first `m_ineq` rows are the
    /// projected (inequality) block.
    pub fn stacked_constraints(&self) -> (SparseMatrix, Vec<f64>) {
        let a = SparseMatrix::vstack(&self.a_ineq, &self.a_eq).expect("validated dimensions");
        let mut b = self.b_ineq.clone();
        b.extend_from_slice(&self.b_eq);
        (a, b)
    }

    /// `½ xᵀQx + cᵀx + objective_constant`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let qx = self.q.spmv(x).expect("x has length n");
        0.5 * dot(x, &qx) + dot(&self.c, x) + self.objective_constant
    }

    /// Max constraint violation of `x`; 0 when feasible.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let ax = self.a_ineq.spmv(x).expect("x has length n");
        let ineq = ax.iter().zip(&self.b_ineq).fold(0.0f64, |m, (a, b)| m.max(a - b));
        let ex = self.a_eq.spmv(x).expect("x has length n");
        let eq = ex.iter().zip(&self.b_eq).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        ineq.max(eq)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.max_violation(x) <= tol
    }
}

/// Primal-dual pair; `y_ineq` pairs with `A_ineq`, `y_eq` with `A_eq`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    pub x: Vec<f64>,
    pub y_ineq: Vec<f64>,
    pub y_eq: Vec<f64>,
}

impl PrimalDualPoint {
    pub fn zeros(p: &QuadraticProgram) -> Self {
        PrimalDualPoint { x: vec![0.0; p.n()], y_ineq: vec![0.0; p.m_ineq()], y_eq: vec![0.0; p.m_eq()] }
    }

    /// Builds a point from a stacked dual `[y_ineq; y_eq]`.
    pub fn from_stacked(x: Vec<f64>, y: &[f64], m_ineq: usize) -> Self {
        PrimalDualPoint { x, y_ineq: y[..m_ineq].to_vec(), y_eq: y[m_ineq..].to_vec() }
    }

    pub fn stacked_y(&self) -> Vec<f64> {
        let mut y = self.y_ineq.clone();
        y.extend_from_slice(&self.y_eq);
        y
    }

    pub fn check_dims(&self, p: &QuadraticProgram) -> Result<()> {
        if self.x.len() != p.n() || self.y_ineq.len() != p.m_ineq() || self.y_eq.len() != p.m_eq() {
            return Err(Error::Dimension(format!(
                "point ({}, {}, {}) vs problem ({}, {}, {})",
                self.x.len(),
                self.y_ineq.len(),
                self.y_eq.len(),
                p.n(),
                p.m_ineq(),
                p.m_eq()
            )));
        }
        Ok(())
    }

    /// Euclidean distance over all components.
    pub fn distance(&self, other: &PrimalDualPoint) -> f64 {
        let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
        (sq(&self.x, &other.x) + sq(&self.y_ineq, &other.y_ineq) + sq(&self.y_eq, &other.y_eq)).sqrt()
    }
}

/// Problem as read from a file: variable bounds and two-sided rows, before
/// canonicalization. Infinite bounds are encoded as `±f64::INFINITY`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawProblem {
    pub name: String,
    pub var_names: Vec<String>,
    pub row_names: Vec<String>,
    pub q: SparseMatrix,
    pub c: Vec<f64>,
    pub objective_constant: f64,
    pub a: SparseMatrix,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
}

impl RawProblem {
    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.row_lower.len()
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        let ax = self.a.spmv(x).expect("x has length n");
        let rows_ok = ax
            .iter()
            .zip(self.row_lower.iter().zip(&self.row_upper))
            .all(|(v, (lo, hi))| *v >= lo - tol && *v <= hi + tol);
        let vars_ok = x
            .iter()
            .zip(self.var_lower.iter().zip(&self.var_upper))
            .all(|(v, (lo, hi))| *v >= lo - tol && *v <= hi + tol);
        rows_ok && vars_ok
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
