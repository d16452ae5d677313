//! Application-style QP classes. Every builder takes explicit data; the
//! `gen_*` functions draw that data from the spec's seed.
//!
//! | class     | variables     | objective                   | constraints                                   |
//! |-----------|---------------|-----------------------------|-----------------------------------------------|
//! | control   | `(x₀..x_T, u₀..u_{T−1})` | `Σ x_tᵀQ_x x_t + Σ u_tᵀR u_t` | `x₀ = x_init`, `x_{t+1} = A_d x_t + B_d u_t`, `‖x_t‖∞ ≤ x̄`, `‖u_t‖∞ ≤ ū` |
//! | portfolio | `(x, y)`      | `xᵀDx + yᵀy − μᵀx/γ`        | `y = Fᵀx`, `1ᵀx = 1`, `x ≥ 0`                  |
//! | huber     | `(x, u, r, s)`| `uᵀu + 2·1ᵀ(r + s)`         | `Ax − u − r + s = b`, `r, s ≥ 0`              |
//! | lasso     | `(x, y, t)`   | `yᵀy + λ1ᵀt`                | `y − Ax = −b`, `−t ≤ x ≤ t`                   |
//! | svm       | `(x, t)`      | `xᵀx + λ1ᵀt`                | `t_i ≥ 1 − y_i a_iᵀx`, `t ≥ 0`                |
//!
//! Quadratic terms are stored as `Q` in `½zᵀQz`, so `xᵀDx` becomes `2D`.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::{rng, sparse_gaussian, GenSpec, Instance, InstanceMetadata};
use crate::error::{Error, Result};
use crate::model::{QuadraticProgram, SparseMatrix};

const CONTROL_HORIZON: usize = 10;
const CONTROL_STATE_BOUND: f64 = 5.0;
const CONTROL_INPUT_BOUND: f64 = 1.0;

/// Row blocks assembled with column offsets.
#[derive(Default)]
struct Rows {
    t: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
}

impl Rows {
    fn push(&mut self, entries: impl IntoIterator<Item = (usize, f64)>, rhs: f64) {
        let i = self.rhs.len();
        self.t.extend(entries.into_iter().map(|(j, v)| (i, j, v)));
        self.rhs.push(rhs);
    }

    fn build(self, n: usize) -> Result<(SparseMatrix, Vec<f64>)> {
        Ok((SparseMatrix::from_triplets(self.rhs.len(), n, &self.t)?, self.rhs))
    }
}

fn diag_block(t: &mut Vec<(usize, usize, f64)>, offset: usize, d: &[f64]) {
    t.extend(d.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (offset + i, offset + i, *v)));
}

fn problem(
    name: &str,
    n: usize,
    q: Vec<(usize, usize, f64)>,
    c: Vec<f64>,
    ineq: Rows,
    eq: Rows,
) -> Result<QuadraticProgram> {
    let (ai, bi) = ineq.build(n)?;
    let (ae, be) = eq.build(n)?;
    QuadraticProgram::new(name, SparseMatrix::from_triplets(n, n, &q)?, c, ai, bi, ae, be)
}

/// Lasso in `(x, y, t)`.
pub fn lasso_from_data(a: &SparseMatrix, b: &[f64], lambda: f64) -> Result<QuadraticProgram> {
    let (m, n) = (a.n_rows(), a.n_cols());
    if b.len() != m || !(lambda >= 0.0) {
        return Err(Error::InvalidArgument("lasso data".into()));
    }
    let (oy, ot) = (n, n + m);
    let nv = 2 * n + m;
    let mut q = Vec::new();
    diag_block(&mut q, oy, &vec![2.0; m]);
    let mut c = vec![0.0; nv];
    c[ot..].iter_mut().for_each(|v| *v = lambda);
    let mut eq = Rows::default();
    for i in 0..m {
        eq.push(std::iter::once((oy + i, 1.0)).chain(a.row(i).map(|(j, v)| (j, -v))), -b[i]);
    }
    let mut ineq = Rows::default();
    for j in 0..n {
        ineq.push([(j, 1.0), (ot + j, -1.0)], 0.0);
        ineq.push([(j, -1.0), (ot + j, -1.0)], 0.0);
    }
    problem("lasso", nv, q, c, ineq, eq)
}

/// Soft-margin SVM in `(x, t)`; `labels` are ±1.
pub fn svm_from_data(features: &SparseMatrix, labels: &[f64], lambda: f64) -> Result<QuadraticProgram> {
    let (m, n) = (features.n_rows(), features.n_cols());
    if labels.len() != m || !(lambda >= 0.0) {
        return Err(Error::InvalidArgument("svm data".into()));
    }
    let nv = n + m;
    let mut q = Vec::new();
    diag_block(&mut q, 0, &vec![2.0; n]);
    let mut c = vec![0.0; nv];
    c[n..].iter_mut().for_each(|v| *v = lambda);
    let mut ineq = Rows::default();
    for i in 0..m {
        let y = labels[i];
        ineq.push(features.row(i).map(|(j, v)| (j, -y * v)).chain(std::iter::once((n + i, -1.0))), -1.0);
    }
    for i in 0..m {
        ineq.push([(n + i, -1.0)], 0.0);
    }
    problem("svm", nv, q, c, ineq, Rows::default())
}

/// Factor-model portfolio in `(x, y)`; `factors` is `n×k`.
pub fn portfolio_from_data(risk: &[f64], factors: &SparseMatrix, mu: &[f64], gamma: f64) -> Result<QuadraticProgram> {
    let (n, k) = (factors.n_rows(), factors.n_cols());
    if risk.len() != n || mu.len() != n || !(gamma > 0.0) || risk.iter().any(|d| *d < 0.0) {
        return Err(Error::InvalidArgument("portfolio data".into()));
    }
    let nv = n + k;
    let mut q = Vec::new();
    diag_block(&mut q, 0, &risk.iter().map(|d| 2.0 * d).collect::<Vec<_>>());
    diag_block(&mut q, n, &vec![2.0; k]);
    let mut c = vec![0.0; nv];
    c[..n].iter_mut().zip(mu).for_each(|(v, m)| *v = -m / gamma);
    let mut eq = Rows::default();
    for f in 0..k {
        eq.push(std::iter::once((n + f, 1.0)).chain(factors.col(f).map(|(j, v)| (j, -v))), 0.0);
    }
    eq.push((0..n).map(|j| (j, 1.0)), 1.0);
    let mut ineq = Rows::default();
    for j in 0..n {
        ineq.push([(j, -1.0)], 0.0);
    }
    problem("portfolio", nv, q, c, ineq, eq)
}

/// Huber fitting in `(x, u, r, s)` with unit threshold.
pub fn huber_from_data(a: &SparseMatrix, b: &[f64]) -> Result<QuadraticProgram> {
    let (m, n) = (a.n_rows(), a.n_cols());
    if b.len() != m {
        return Err(Error::InvalidArgument("huber data".into()));
    }
    let (ou, or, os) = (n, n + m, n + 2 * m);
    let nv = n + 3 * m;
    let mut q = Vec::new();
    diag_block(&mut q, ou, &vec![2.0; m]);
    let mut c = vec![0.0; nv];
    c[or..].iter_mut().for_each(|v| *v = 2.0);
    let mut eq = Rows::default();
    for i in 0..m {
        eq.push(a.row(i).chain([(ou + i, -1.0), (or + i, -1.0), (os + i, 1.0)]), b[i]);
    }
    let mut ineq = Rows::default();
    for i in 0..2 * m {
        ineq.push([(or + i, -1.0)], 0.0);
    }
    problem("huber", nv, q, c, ineq, eq)
}

/// Finite-horizon control in `(x₀..x_T, u₀..u_{T−1})`.
pub fn control_from_data(
    ad: &SparseMatrix,
    bd: &SparseMatrix,
    state_cost: &[f64],
    input_cost: &[f64],
    x_init: &[f64],
    horizon: usize,
    state_bound: f64,
    input_bound: f64,
) -> Result<QuadraticProgram> {
    let (nx, nu) = (ad.n_rows(), bd.n_cols());
    if ad.n_cols() != nx || bd.n_rows() != nx || state_cost.len() != nx || input_cost.len() != nu || x_init.len() != nx {
        return Err(Error::InvalidArgument("control data".into()));
    }
    let xo = |t: usize| t * nx;
    let uo = |t: usize| (horizon + 1) * nx + t * nu;
    let nv = (horizon + 1) * nx + horizon * nu;
    let mut q = Vec::new();
    for t in 0..=horizon {
        diag_block(&mut q, xo(t), &state_cost.iter().map(|v| 2.0 * v).collect::<Vec<_>>());
    }
    for t in 0..horizon {
        diag_block(&mut q, uo(t), &input_cost.iter().map(|v| 2.0 * v).collect::<Vec<_>>());
    }
    let mut eq = Rows::default();
    for i in 0..nx {
        eq.push([(xo(0) + i, 1.0)], x_init[i]);
    }
    for t in 0..horizon {
        for i in 0..nx {
            let row = std::iter::once((xo(t + 1) + i, 1.0))
                .chain(ad.row(i).map(|(j, v)| (xo(t) + j, -v)))
                .chain(bd.row(i).map(|(j, v)| (uo(t) + j, -v)));
            eq.push(row, 0.0);
        }
    }
    let mut ineq = Rows::default();
    for t in 1..=horizon {
        for i in 0..nx {
            ineq.push([(xo(t) + i, 1.0)], state_bound);
            ineq.push([(xo(t) + i, -1.0)], state_bound);
        }
    }
    for t in 0..horizon {
        for i in 0..nu {
            ineq.push([(uo(t) + i, 1.0)], input_bound);
            ineq.push([(uo(t) + i, -1.0)], input_bound);
        }
    }
    problem("control", nv, q, vec![0.0; nv], ineq, eq)
}

pub fn gen_control(spec: &GenSpec) -> Result<Instance> {
    let nx = spec.n.max(1);
    let nu = (nx / 2).max(1);
    let mut r = rng(spec.seed);
    let mut at: Vec<(usize, usize, f64)> = (0..nx).map(|i| (i, i, 1.0)).collect();
    at.extend(sparse_gaussian(&mut r, nx, nx, spec.density).into_iter().map(|(i, j, v)| (i, j, 0.1 * v)));
    let raw = SparseMatrix::from_triplets(nx, nx, &at)?;
    // Row sums at most 0.95 keep the input-free trajectory inside the box.
    let shrink: Vec<f64> = (0..nx).map(|i| 0.95 / raw.row_norm_l1(i).max(0.95)).collect();
    let ad = raw.scale(&shrink, &vec![1.0; nx])?;
    let bd = SparseMatrix::from_triplets(nx, nu, &sparse_gaussian(&mut r, nx, nu, spec.density))?;
    let state_cost: Vec<f64> = (0..nx).map(|_| if r.random::<f64>() < 0.7 { 10.0 * r.random::<f64>() } else { 0.0 }).collect();
    let input_cost = vec![0.1; nu];
    let x_init: Vec<f64> = (0..nx).map(|_| r.random_range(-1.0..1.0)).collect();
    let p = control_from_data(&ad, &bd, &state_cost, &input_cost, &x_init, CONTROL_HORIZON, CONTROL_STATE_BOUND, CONTROL_INPUT_BOUND)?;

    let mut cert = x_init.clone();
    let mut xt = x_init;
    for _ in 0..CONTROL_HORIZON {
        xt = ad.spmv(&xt)?;
        cert.extend_from_slice(&xt);
    }
    cert.resize(p.n(), 0.0);
    Ok(Instance { problem: p, metadata: InstanceMetadata { feasible_point: Some(cert), ..InstanceMetadata::from_spec(spec) } })
}

pub fn gen_portfolio(spec: &GenSpec) -> Result<Instance> {
    let n = spec.n.max(2);
    let k = (n / 10).max(1);
    let mut r = rng(spec.seed);
    let f = SparseMatrix::from_triplets(n, k, &sparse_gaussian(&mut r, n, k, spec.density.max(0.5)))?;
    let risk: Vec<f64> = (0..n).map(|_| r.random::<f64>() * (k as f64).sqrt()).collect();
    let mu: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
    let p = portfolio_from_data(&risk, &f, &mu, 1.0)?;
    let x = vec![1.0 / n as f64; n];
    let mut cert = x.clone();
    cert.extend(f.spmv_t(&x)?);
    Ok(Instance { problem: p, metadata: InstanceMetadata { feasible_point: Some(cert), ..InstanceMetadata::from_spec(spec) } })
}

fn regression_data(spec: &GenSpec, sparse_truth: bool) -> Result<(SparseMatrix, Vec<f64>)> {
    let n = spec.n.max(1);
    let m = 10 * n;
    let mut r = rng(spec.seed);
    let a = SparseMatrix::from_triplets(m, n, &sparse_gaussian(&mut r, m, n, spec.density))?;
    let scale = Normal::new(0.0, 1.0 / (n as f64).sqrt()).expect("valid");
    let truth: Vec<f64> = (0..n)
        .map(|_| if sparse_truth && r.random::<f64>() < 0.5 { 0.0 } else { scale.sample(&mut r) })
        .collect();
    let mut b = a.spmv(&truth)?;
    for v in b.iter_mut() {
        *v += if !sparse_truth && r.random::<f64>() < 0.05 {
            10.0 * r.random::<f64>()
        } else {
            0.5 * Distribution::<f64>::sample(&StandardNormal, &mut r)
        };
    }
    Ok((a, b))
}

pub fn gen_huber(spec: &GenSpec) -> Result<Instance> {
    let (a, b) = regression_data(spec, false)?;
    let p = huber_from_data(&a, &b)?;
    let (m, n) = (a.n_rows(), a.n_cols());
    let mut cert = vec![0.0; n + m];
    cert.extend(b.iter().map(|v| (-v).max(0.0)));
    cert.extend(b.iter().map(|v| v.max(0.0)));
    Ok(Instance { problem: p, metadata: InstanceMetadata { feasible_point: Some(cert), ..InstanceMetadata::from_spec(spec) } })
}

pub fn gen_lasso(spec: &GenSpec) -> Result<Instance> {
    let (a, b) = regression_data(spec, true)?;
    let atb = a.spmv_t(&b)?;
    let lambda = 0.2 * atb.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = lasso_from_data(&a, &b, lambda)?;
    let (m, n) = (a.n_rows(), a.n_cols());
    let mut cert = vec![0.0; n];
    cert.extend(b.iter().map(|v| -v));
    cert.extend(vec![0.0; n]);
    debug_assert_eq!(cert.len(), 2 * n + m);
    Ok(Instance { problem: p, metadata: InstanceMetadata { feasible_point: Some(cert), ..InstanceMetadata::from_spec(spec) } })
}

pub fn gen_svm(spec: &GenSpec) -> Result<Instance> {
    let n = spec.n.max(1);
    let m = 10 * n;
    let mut r = rng(spec.seed);
    let labels: Vec<f64> = (0..m).map(|i| if i < m / 2 { 1.0 } else { -1.0 }).collect();
    let shift = 1.0 / n as f64;
    let t: Vec<_> = sparse_gaussian(&mut r, m, n, spec.density)
        .into_iter()
        .map(|(i, j, v)| (i, j, v + labels[i] * shift))
        .collect();
    let features = SparseMatrix::from_triplets(m, n, &t)?;
    let p = svm_from_data(&features, &labels, 1.0)?;
    let mut cert = vec![0.0; n];
    cert.extend(vec![1.0; m]);
    Ok(Instance { problem: p, metadata: InstanceMetadata { feasible_point: Some(cert), ..InstanceMetadata::from_spec(spec) } })
}
