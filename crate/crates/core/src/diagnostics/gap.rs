//! Smoothed duality gap, scaled KKT residual and the residual bounds they
//! imply. These are test-surface utilities: they use dense algebra and are
//! capped in size.
//!
//! Conventions: the saddle function is `L(x, y) = ½xᵀQx + cᵀx + yᵀ(Ax − b)`
//! with `A = [A_ineq; A_eq]`. Inequality duals live in the nonnegative
//! orthant, equality duals are free, so every `[·]₊` below acts on the
//! inequality block only.

use serde::Serialize;

use super::dense::{check_cap, symmetric_norm, ShiftedSpectrum, DENSE_CAP};
use crate::error::{Error, Result};
use crate::model::{dot, PrimalDualPoint, QuadraticProgram};

/// Largest `n + m` accepted by [`smoothed_gap_bruteforce`].
pub const BRUTEFORCE_CAP: usize = 50;
const BRUTEFORCE_MAX_STEPS: usize = 1_000_000;
const BRUTEFORCE_GRAD_TOL: f64 = 1e-10;

/// Smoothing parameter and proximal center of the smoothed gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedGapParams {
    pub xi: f64,
    pub center: PrimalDualPoint,
}

impl SmoothedGapParams {
    pub fn new(xi: f64, center: PrimalDualPoint) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidArgument(format!("smoothing parameter must be positive, got {xi}")));
        }
        Ok(SmoothedGapParams { xi, center })
    }
}

struct Blocks {
    ax_minus_b: Vec<f64>,
    aty: Vec<f64>,
    qx: Vec<f64>,
    b: Vec<f64>,
    y: Vec<f64>,
    m_ineq: usize,
}

fn blocks(p: &QuadraticProgram, z: &PrimalDualPoint) -> Result<Blocks> {
    z.check_dims(p)?;
    if let Some((index, &value)) = z.y_ineq.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeDual { index, value });
    }
    let (a, b) = p.stacked_constraints();
    let y = z.stacked_y();
    let ax = a.spmv(&z.x)?;
    Ok(Blocks {
        ax_minus_b: ax.iter().zip(&b).map(|(u, v)| u - v).collect(),
        aty: a.spmv_t(&y)?,
        qx: p.q.spmv(&z.x)?,
        b,
        y,
        m_ineq: p.m_ineq(),
    })
}

fn pos_if(v: f64, projected: bool) -> f64 {
    if projected {
        v.max(0.0)
    } else {
        v
    }
}

/// Closed form of `G_ξ(z; ż)`.
///
/// Valid for any center `ż`; the maximization over `ŷ` and `x̂` separates
/// and both parts are explicit. Requires `y_ineq ≥ 0`.
pub fn smoothed_gap_closed(p: &QuadraticProgram, z: &PrimalDualPoint, params: &SmoothedGapParams) -> Result<f64> {
    check_cap(p.n(), DENSE_CAP)?;
    params.center.check_dims(p)?;
    let xi = params.xi;
    let bl = blocks(p, z)?;
    let y_c = params.center.stacked_y();
    let x_c = &params.center.x;

    let base = 0.5 * dot(&z.x, &bl.qx) + dot(&p.c, &z.x) + dot(&bl.b, &bl.y);

    let dual_part: f64 = bl
        .ax_minus_b
        .iter()
        .zip(&y_c)
        .enumerate()
        .map(|(i, (r, yc))| {
            let v = pos_if(yc + r / xi, i < bl.m_ineq);
            0.5 * xi * (v * v - yc * yc)
        })
        .sum();

    let w: Vec<f64> = x_c
        .iter()
        .zip(p.c.iter().zip(&bl.aty))
        .map(|(xc, (c, aty))| xc - (c + aty) / xi)
        .collect();
    let spectrum = ShiftedSpectrum::new(&p.q, xi);
    let primal_part = 0.5 * xi * spectrum.inv_norm_sq(&w) - 0.5 * xi * dot(x_c, x_c);

    Ok(base + dual_part + primal_part)
}

/// `G_ξ(z; ż)` by direct projected gradient ascent on
/// `ẑ ↦ L(x, ŷ) − L(x̂, y) − (ξ/2)‖ẑ − ż‖²`.
///
/// Independent of [`smoothed_gap_closed`]; runs until the gradient mapping
/// drops below `1e-10` and fails after `10⁶` steps.
pub fn smoothed_gap_bruteforce(p: &QuadraticProgram, z: &PrimalDualPoint, params: &SmoothedGapParams) -> Result<f64> {
    check_cap(p.n() + p.m(), BRUTEFORCE_CAP)?;
    params.center.check_dims(p)?;
    let xi = params.xi;
    let (a, b) = p.stacked_constraints();
    let y = z.stacked_y();
    if let Some((index, &value)) = z.y_ineq.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeDual { index, value });
    }
    let m_ineq = p.m_ineq();
    let x = &z.x;
    let ax_minus_b: Vec<f64> = a.spmv(x)?.iter().zip(&b).map(|(u, v)| u - v).collect();
    let aty = a.spmv_t(&y)?;
    let qx = p.q.spmv(x)?;
    let x_c = &params.center.x;
    let y_c = params.center.stacked_y();

    // L(x, ŷ) − L(x̂, y) minus the proximal term, as a function of ẑ.
    let objective = |xh: &[f64], yh: &[f64]| -> f64 {
        let qxh = p.q.spmv(xh).expect("dims");
        let l_x_yh = 0.5 * dot(x, &qx) + dot(&p.c, x) + dot(yh, &ax_minus_b);
        let l_xh_y = 0.5 * dot(xh, &qxh) + dot(&p.c, xh) + dot(&aty, xh) - dot(&y, &b);
        let prox: f64 = xh.iter().zip(x_c).map(|(u, v)| (u - v) * (u - v)).sum::<f64>()
            + yh.iter().zip(&y_c).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
        l_x_yh - l_xh_y - 0.5 * xi * prox
    };

    let step = 1.0 / (p.q.frobenius_norm() + xi);
    let mut xh = x_c.clone();
    let mut yh: Vec<f64> = y_c.iter().enumerate().map(|(i, v)| pos_if(*v, i < m_ineq)).collect();
    let mut qxh = vec![0.0; p.n()];
    for _ in 0..BRUTEFORCE_MAX_STEPS {
        p.q.spmv_into(&xh, &mut qxh);
        let mut mapping_sq = 0.0;
        for j in 0..xh.len() {
            let g = -qxh[j] - p.c[j] - aty[j] - xi * (xh[j] - x_c[j]);
            let next = xh[j] + step * g;
            mapping_sq += ((next - xh[j]) / step).powi(2);
            xh[j] = next;
        }
        for i in 0..yh.len() {
            let g = ax_minus_b[i] - xi * (yh[i] - y_c[i]);
            let next = pos_if(yh[i] + step * g, i < m_ineq);
            mapping_sq += ((next - yh[i]) / step).powi(2);
            yh[i] = next;
        }
        if mapping_sq.sqrt() <= BRUTEFORCE_GRAD_TOL {
            return Ok(objective(&xh, &yh));
        }
    }
    Err(Error::Oracle(format!(
        "projected gradient ascent did not converge in {BRUTEFORCE_MAX_STEPS} steps"
    )))
}

/// Stacked residual `([Ax−b]₊; (I+Q/ξ)^{-1/2}(Qx+c+Aᵀy); y − [y − (b−Ax)/ξ]₊)`
/// of length `m + n + m`. It vanishes exactly at primal-dual optima.
pub fn scaled_kkt_residual(p: &QuadraticProgram, z: &PrimalDualPoint, xi: f64) -> Result<Vec<f64>> {
    check_cap(p.n(), DENSE_CAP)?;
    if !(xi > 0.0) {
        return Err(Error::InvalidArgument(format!("smoothing parameter must be positive, got {xi}")));
    }
    let bl = blocks(p, z)?;
    let m = bl.y.len();
    let mut out = Vec::with_capacity(2 * m + p.n());
    out.extend(bl.ax_minus_b.iter().enumerate().map(|(i, r)| pos_if(*r, i < bl.m_ineq)));
    let grad: Vec<f64> = (0..p.n()).map(|j| bl.qx[j] + p.c[j] + bl.aty[j]).collect();
    out.extend(ShiftedSpectrum::new(&p.q, xi).inv_sqrt_apply(&grad));
    out.extend(bl.y.iter().zip(&bl.ax_minus_b).enumerate().map(|(i, (y, r))| {
        // b − Ax = −r
        y - pos_if(y + r / xi, i < bl.m_ineq)
    }));
    Ok(out)
}

/// One inequality of the form `lhs ≤ rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualBoundReport {
    pub gap: f64,
    pub checks: Vec<BoundCheck>,
}

impl ResidualBoundReport {
    pub fn violations(&self, tol: f64) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds(tol)).collect()
    }
}

/// Evaluates the five residual bounds implied by the smoothed gap at an
/// optimum `z*`:
///
/// * `‖[Ax−b]₊‖² ≤ 2ξ G`
/// * `‖Qx+c+Aᵀy*‖² ≤ 2‖Q‖ G`
/// * `‖Qx*+c+Aᵀy‖²_{(I+Q/ξ)⁻¹} ≤ 2ξ G`
/// * `‖y − [y − (b−Ax*)/ξ]₊‖² ≤ G/ξ`
/// * `‖y* − [y* − (b−Ax)/ξ]₊‖² ≤ 2G/ξ`
pub fn residual_bound_check(
    p: &QuadraticProgram,
    z: &PrimalDualPoint,
    xi: f64,
    z_star: &PrimalDualPoint,
) -> Result<ResidualBoundReport> {
    let params = SmoothedGapParams::new(xi, z_star.clone())?;
    let gap = smoothed_gap_closed(p, z, &params)?;
    let at_z = blocks(p, z)?;
    let at_star = blocks(p, z_star)?;
    let m_ineq = p.m_ineq();
    let sq = |v: &mut dyn Iterator<Item = f64>| v.map(|t| t * t).sum::<f64>();

    let primal = sq(&mut at_z.ax_minus_b.iter().enumerate().map(|(i, r)| pos_if(*r, i < m_ineq)));
    // Qx + c + Aᵀy*
    let dual_x = sq(&mut (0..p.n()).map(|j| at_z.qx[j] + p.c[j] + at_star.aty[j]));
    // Qx* + c + Aᵀy
    let grad_y: Vec<f64> = (0..p.n()).map(|j| at_star.qx[j] + p.c[j] + at_z.aty[j]).collect();
    let dual_y = ShiftedSpectrum::new(&p.q, xi).inv_norm_sq(&grad_y);
    let comp_y = sq(&mut at_z
        .y
        .iter()
        .zip(&at_star.ax_minus_b)
        .enumerate()
        .map(|(i, (y, r))| y - pos_if(y + r / xi, i < m_ineq)));
    let comp_star = sq(&mut at_star
        .y
        .iter()
        .zip(&at_z.ax_minus_b)
        .enumerate()
        .map(|(i, (y, r))| y - pos_if(y + r / xi, i < m_ineq)));
    let norm_q = symmetric_norm(&p.q);

    Ok(ResidualBoundReport {
        gap,
        checks: vec![
            BoundCheck { name: "primal_residual", lhs: primal, rhs: 2.0 * xi * gap },
            BoundCheck { name: "dual_residual_at_x", lhs: dual_x, rhs: 2.0 * norm_q * gap },
            BoundCheck { name: "dual_residual_at_y", lhs: dual_y, rhs: 2.0 * xi * gap },
            BoundCheck { name: "complementarity_at_y", lhs: comp_y, rhs: gap / xi },
            BoundCheck { name: "complementarity_at_x", lhs: comp_star, rhs: 2.0 * gap / xi },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SparseMatrix;

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
    fn gap_vanishes_at_optimum() {
        let params = SmoothedGapParams::new(1.0, pt(0.5, 1.0)).unwrap();
        let g = smoothed_gap_closed(&one_dim(), &pt(0.5, 1.0), &params).unwrap();
        assert!(g.abs() < 1e-14, "{g}");
        let gb = smoothed_gap_bruteforce(&one_dim(), &pt(0.5, 1.0), &params).unwrap();
        assert!(gb.abs() < 1e-8, "{gb}");
    }

    #[test]
    fn one_dim_origin_matches_hand_value() {
        // z=(0,0), ż=(0.5,1), ξ=1
        //   ŷ-part: max_{ŷ≥0} −0.5ŷ − ½(ŷ−1)²  at ŷ=0.5
        //   x̂-part: max −x̂² + 2x̂ − ½(x̂−0.5)²  at x̂=5/6
        let params = SmoothedGapParams::new(1.0, pt(0.5, 1.0)).unwrap();
        let g = smoothed_gap_closed(&one_dim(), &pt(0.0, 0.0), &params).unwrap();
        let expected = -0.375 + (-(25.0 / 36.0) + 10.0 / 6.0 - 0.5 * (1.0f64 / 3.0).powi(2));
        assert!((g - expected).abs() < 1e-12, "{g} vs {expected}");
        let gb = smoothed_gap_bruteforce(&one_dim(), &pt(0.0, 0.0), &params).unwrap();
        assert!((g - gb).abs() < 1e-6);
    }

    #[test]
    fn negative_dual_is_rejected() {
        let params = SmoothedGapParams::new(1.0, pt(0.5, 1.0)).unwrap();
        assert!(smoothed_gap_closed(&one_dim(), &pt(0.0, -0.1), &params).is_err());
        assert!(SmoothedGapParams::new(0.0, pt(0.5, 1.0)).is_err());
    }

    #[test]
    fn scaled_residual_zero_at_optimum() {
        let f = scaled_kkt_residual(&one_dim(), &pt(0.5, 1.0), 0.7).unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.iter().all(|v| v.abs() < 1e-12), "{f:?}");
    }

    #[test]
    fn scaled_residual_without_q_is_plain_dual_residual() {
        let p = QuadraticProgram::with_inequalities(
            "lp",
            SparseMatrix::zeros(2, 2),
            vec![1.0, -1.0],
            SparseMatrix::from_dense(&[vec![1.0, 2.0]]).unwrap(),
            vec![3.0],
        )
        .unwrap();
        let z = PrimalDualPoint { x: vec![0.5, 0.25], y_ineq: vec![0.2], y_eq: vec![] };
        let f = scaled_kkt_residual(&p, &z, 2.0).unwrap();
        assert!((f[1] - 1.2).abs() < 1e-12 && (f[2] - (-0.6)).abs() < 1e-12, "{f:?}");
    }

    #[test]
    fn complementarity_block_inactive_row() {
        // y = 0 and Ax < b: 0 − [0 − (b−Ax)/ξ]₊ = 0
        let f = scaled_kkt_residual(&one_dim(), &pt(0.0, 0.0), 1.0).unwrap();
        assert_eq!(f[0], 0.0);
        assert_eq!(f[2], 0.0);
    }

    #[test]
    fn residual_bounds_at_optimum_and_nearby() {
        let star = pt(0.5, 1.0);
        let rep = residual_bound_check(&one_dim(), &star, 1.0, &star).unwrap();
        assert!(rep.checks.iter().all(|c| c.lhs.abs() < 1e-14 && c.rhs.abs() < 1e-12));
        for (dx, dy) in [(0.1, 0.2), (-0.3, 0.5), (0.05, -0.9), (1.0, 2.0)] {
            let z = pt(0.5 + dx, 1.0 + dy);
            for xi in [0.1, 1.0, 10.0] {
                let rep = residual_bound_check(&one_dim(), &z, xi, &star).unwrap();
                assert!(rep.violations(1e-12).is_empty(), "{rep:?}");
            }
        }
    }

    #[test]
    fn size_caps() {
        let n = BRUTEFORCE_CAP + 1;
        let p = QuadraticProgram::with_inequalities(
            "big",
            SparseMatrix::zeros(n, n),
            vec![0.0; n],
            SparseMatrix::zeros(0, n),
            vec![],
        )
        .unwrap();
        let z = PrimalDualPoint::zeros(&p);
        let params = SmoothedGapParams::new(1.0, z.clone()).unwrap();
        assert!(matches!(smoothed_gap_bruteforce(&p, &z, &params), Err(Error::UnsupportedSize { .. })));
    }
}
