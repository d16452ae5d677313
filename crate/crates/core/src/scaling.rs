//! Diagonal preconditioning.
//!
//! All passes act on the symmetric stacked matrix
//!
//! ```text
//! M = [ Q  Aᵀ ]
//!     [ A  0  ]     A = [A_ineq; A_eq]
//! ```
//!
//! with a single diagonal `D = diag(D₂, D₁)`, so `D M D` keeps `Q̃ = D₂QD₂`
//! symmetric and `Ã = D₁AD₂`. The scheme is 10 Ruiz passes, one ℓ2 pass and
//! one Pock–Chambolle pass (α = 1).

use crate::error::{Error, Result};
use crate::model::{PrimalDualPoint, QuadraticProgram, SparseMatrix};

pub const RUIZ_ITERATIONS: usize = 10;

/// Row/dual factors `d1` (length `m_ineq + m_eq`) and column/primal factors
/// `d2` (length `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingInfo {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

#[derive(Clone, Copy)]
enum RowNorm {
    Max,
    L2,
    L1,
}

impl ScalingInfo {
    pub fn identity(p: &QuadraticProgram) -> Self {
        ScalingInfo { d1: vec![1.0; p.m()], d2: vec![1.0; p.n()] }
    }

    fn check(&self, p: &QuadraticProgram) -> Result<()> {
        if self.d1.len() != p.m() || self.d2.len() != p.n() {
            return Err(Error::Dimension(format!(
                "scaling ({}, {}) vs problem (m={}, n={})",
                self.d1.len(),
                self.d2.len(),
                p.m(),
                p.n()
            )));
        }
        Ok(())
    }
}

/// Running state of the stacked matrix during equilibration.
struct Stacked {
    q: SparseMatrix,
    a: SparseMatrix,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Stacked {
    fn new(p: &QuadraticProgram) -> Self {
        let (a, _) = p.stacked_constraints();
        Stacked { q: p.q.clone(), a, d1: vec![1.0; p.m()], d2: vec![1.0; p.n()] }
    }

    /// Norms of the rows of `M`: the first `n` rows combine a row of `Q`
    /// with a column of `A`.
    fn row_norms(&self, kind: RowNorm) -> (Vec<f64>, Vec<f64>) {
        let primal = (0..self.q.n_rows())
            .map(|j| match kind {
                RowNorm::Max => self.q.row_abs_max(j).max(self.a.col_abs_max(j)),
                RowNorm::L2 => (self.q.row_norm_sq(j) + self.a.col_norm_sq(j)).sqrt(),
                RowNorm::L1 => self.q.row_norm_l1(j) + self.a.col_norm_l1(j),
            })
            .collect();
        let dual = (0..self.a.n_rows())
            .map(|i| match kind {
                RowNorm::Max => self.a.row_abs_max(i),
                RowNorm::L2 => self.a.row_norm_sq(i).sqrt(),
                RowNorm::L1 => self.a.row_norm_l1(i),
            })
            .collect();
        (primal, dual)
    }

    fn pass(&mut self, kind: RowNorm) {
        let (primal, dual) = self.row_norms(kind);
        let factor = |v: &f64| if *v > 0.0 { 1.0 / v.sqrt() } else { 1.0 };
        let e2: Vec<f64> = primal.iter().map(factor).collect();
        let e1: Vec<f64> = dual.iter().map(factor).collect();
        self.q = self.q.scale(&e2, &e2).expect("dims");
        self.a = self.a.scale(&e1, &e2).expect("dims");
        self.d1.iter_mut().zip(&e1).for_each(|(d, e)| *d *= e);
        self.d2.iter_mut().zip(&e2).for_each(|(d, e)| *d *= e);
    }

    fn info(self) -> ScalingInfo {
        ScalingInfo { d1: self.d1, d2: self.d2 }
    }
}

/// Ruiz, then ℓ2, then Pock–Chambolle. Zero rows get factor 1.
pub fn compute_scaling(p: &QuadraticProgram) -> ScalingInfo {
    let mut s = Stacked::new(p);
    for _ in 0..RUIZ_ITERATIONS {
        s.pass(RowNorm::Max);
    }
    s.pass(RowNorm::L2);
    s.pass(RowNorm::L1);
    s.info()
}

/// Only the Ruiz stage, `iterations` times.
pub fn ruiz_scaling(p: &QuadraticProgram, iterations: usize) -> ScalingInfo {
    let mut s = Stacked::new(p);
    for _ in 0..iterations {
        s.pass(RowNorm::Max);
    }
    s.info()
}

/// `Q̃ = D₂QD₂`, `Ã = D₁AD₂`, `b̃ = D₁b`, `c̃ = D₂c`. The objective constant
/// and names carry over.
pub fn apply_scaling(p: &QuadraticProgram, s: &ScalingInfo) -> Result<QuadraticProgram> {
    s.check(p)?;
    let mi = p.m_ineq();
    let (d1_ineq, d1_eq) = s.d1.split_at(mi);
    let mul = |a: &[f64], d: &[f64]| a.iter().zip(d).map(|(u, v)| u * v).collect::<Vec<_>>();
    let mut out = QuadraticProgram::new(
        p.name.clone(),
        p.q.scale(&s.d2, &s.d2)?,
        mul(&p.c, &s.d2),
        p.a_ineq.scale(d1_ineq, &s.d2)?,
        mul(&p.b_ineq, d1_ineq),
        p.a_eq.scale(d1_eq, &s.d2)?,
        mul(&p.b_eq, d1_eq),
    )?;
    out.objective_constant = p.objective_constant;
    out.var_names = p.var_names.clone();
    Ok(out)
}

/// `x = D₂x̃`, `y = D₁ỹ`.
pub fn unscale_point(z: &PrimalDualPoint, s: &ScalingInfo) -> PrimalDualPoint {
    map_point(z, s, |v, d| v * d)
}

/// `x̃ = x/D₂`, `ỹ = y/D₁`.
pub fn scale_point(z: &PrimalDualPoint, s: &ScalingInfo) -> PrimalDualPoint {
    map_point(z, s, |v, d| v / d)
}

fn map_point(z: &PrimalDualPoint, s: &ScalingInfo, f: impl Fn(f64, f64) -> f64) -> PrimalDualPoint {
    let mi = z.y_ineq.len();
    PrimalDualPoint {
        x: z.x.iter().zip(&s.d2).map(|(v, d)| f(*v, *d)).collect(),
        y_ineq: z.y_ineq.iter().zip(&s.d1[..mi]).map(|(v, d)| f(*v, *d)).collect(),
        y_eq: z.y_eq.iter().zip(&s.d1[mi..]).map(|(v, d)| f(*v, *d)).collect(),
    }
}
