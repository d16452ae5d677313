//! Test oracles shared by the integration targets.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rapdhg::{PrimalDualPoint, QuadraticProgram, SparseMatrix};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.n_rows(), m.n_cols());
    for (i, j, v) in m.triplets() {
        d[(i, j)] = v;
    }
    d
}

/// Optimal primal-dual pair by active-set enumeration.
///
/// For each subset `S` of inequality rows (smallest first) the equality
/// constrained KKT system with rows `S ∪ eq` is solved by SVD, and the first
/// solution that is primal feasible with nonnegative multipliers is
/// returned. Any such point is optimal for a convex QP.
pub fn active_set_oracle(p: &QuadraticProgram) -> Option<PrimalDualPoint> {
    let n = p.n();
    let (mi, me) = (p.m_ineq(), p.m_eq());
    assert!(mi <= 16, "enumeration is exponential in the inequality count");
    let q = dense(&p.q);
    let ai = dense(&p.a_ineq);
    let ae = dense(&p.a_eq);
    let tol = 1e-9;

    let mut subsets: Vec<u32> = (0..1u32 << mi).collect();
    subsets.sort_by_key(|s| s.count_ones());
    for s in subsets {
        let rows: Vec<usize> = (0..mi).filter(|i| s & (1 << i) != 0).collect();
        let k = rows.len() + me;
        let mut kkt = DMatrix::zeros(n + k, n + k);
        let mut rhs = DVector::zeros(n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(&q);
        for j in 0..n {
            rhs[j] = -p.c[j];
        }
        for (r, &i) in rows.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = ai[(i, j)];
                kkt[(j, n + r)] = ai[(i, j)];
            }
            rhs[n + r] = p.b_ineq[i];
        }
        for i in 0..me {
            let r = rows.len() + i;
            for j in 0..n {
                kkt[(n + r, j)] = ae[(i, j)];
                kkt[(j, n + r)] = ae[(i, j)];
            }
            rhs[n + r] = p.b_eq[i];
        }
        let sol = match kkt.clone().svd(true, true).solve(&rhs, 1e-12) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let scale = 1.0 + rhs.amax();
        if (&kkt * &sol - &rhs).amax() > tol * scale {
            continue;
        }
        let x: Vec<f64> = sol.rows(0, n).iter().copied().collect();
        let mut y_ineq = vec![0.0; mi];
        let mut ok = true;
        for (r, &i) in rows.iter().enumerate() {
            let lam = sol[n + r];
            if lam < -tol * scale {
                ok = false;
            }
            y_ineq[i] = lam.max(0.0);
        }
        let ax = &ai * DVector::from_column_slice(&x);
        if !ok || (0..mi).any(|i| ax[i] > p.b_ineq[i] + tol * scale) {
            continue;
        }
        let y_eq = sol.rows(n + rows.len(), me).iter().copied().collect();
        return Some(PrimalDualPoint { x, y_ineq, y_eq });
    }
    None
}

/// Largest KKT violation of `z`, measured without the library's metric.
pub fn kkt_violation(p: &QuadraticProgram, z: &PrimalDualPoint) -> f64 {
    let q = dense(&p.q);
    let ai = dense(&p.a_ineq);
    let ae = dense(&p.a_eq);
    let x = DVector::from_column_slice(&z.x);
    let yi = DVector::from_column_slice(&z.y_ineq);
    let ye = DVector::from_column_slice(&z.y_eq);
    let grad = &q * &x + DVector::from_column_slice(&p.c) + ai.transpose() * &yi + ae.transpose() * &ye;
    let ri = &ai * &x - DVector::from_column_slice(&p.b_ineq);
    let re = &ae * &x - DVector::from_column_slice(&p.b_eq);
    let mut v = grad.amax();
    for i in 0..ri.len() {
        v = v.max(ri[i].max(0.0)).max((ri[i] * yi[i]).abs()).max((-yi[i]).max(0.0));
    }
    if re.len() > 0 {
        v = v.max(re.amax());
    }
    v
}

fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    // Box–Muller keeps this file independent of the library's samplers.
    let u: f64 = r.random::<f64>().max(1e-300);
    let v: f64 = r.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Random feasible QP with `n ≤ 8`, `m_ineq + m_eq ≤ 8`. `Q` is a possibly
/// rank-deficient Gram matrix plus `0.05·I`.
pub fn random_tiny_qp(seed: u64) -> QuadraticProgram {
    let mut r = ChaCha8Rng::seed_from_u64(0x5eed ^ seed);
    let n = r.random_range(1..=8usize);
    let mi = r.random_range(1..=6usize);
    let me = r.random_range(0..=2usize.min(n - 1).min(2));
    let rank = r.random_range(0..=n);
    let p: Vec<Vec<f64>> = (0..rank).map(|_| (0..n).map(|_| gaussian(&mut r)).collect()).collect();
    let mut q = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] = (0..rank).map(|k| p[k][i] * p[k][j]).sum::<f64>() + if i == j { 0.05 } else { 0.0 };
        }
    }
    let c: Vec<f64> = (0..n).map(|_| 2.0 * gaussian(&mut r)).collect();
    let x0: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
    let row = |r: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| if r.random::<f64>() < 0.7 { gaussian(r) } else { 0.0 }).collect() };
    let ai: Vec<Vec<f64>> = (0..mi).map(|_| row(&mut r)).collect();
    let ae: Vec<Vec<f64>> = (0..me).map(|_| row(&mut r)).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let bi: Vec<f64> = ai.iter().map(|a| dot(a, &x0) + r.random::<f64>()).collect();
    let be: Vec<f64> = ae.iter().map(|a| dot(a, &x0)).collect();
    let mat = |rows: &[Vec<f64>]| {
        if rows.is_empty() {
            SparseMatrix::zeros(0, n)
        } else {
            SparseMatrix::from_dense(rows).unwrap()
        }
    };
    QuadraticProgram::new(format!("tiny{seed}"), SparseMatrix::from_dense(&q).unwrap(), c, mat(&ai), bi, mat(&ae), be).unwrap()
}

/// Random point with nonnegative inequality duals, entries of size `scale`.
pub fn random_point(p: &QuadraticProgram, r: &mut ChaCha8Rng, scale: f64) -> PrimalDualPoint {
    PrimalDualPoint {
        x: (0..p.n()).map(|_| scale * gaussian(r)).collect(),
        y_ineq: (0..p.m_ineq()).map(|_| scale * gaussian(r).abs()).collect(),
        y_eq: (0..p.m_eq()).map(|_| scale * gaussian(r)).collect(),
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
