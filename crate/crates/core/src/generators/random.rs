use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{rng, sparse_gaussian, GenSpec, Instance, InstanceMetadata};
use crate::error::Result;
use crate::model::{QuadraticProgram, SparseMatrix};

const RIDGE: f64 = 1e-2;

/// `PᵀP + 1e-2·I` with `P` an `n×n` sparse Gaussian matrix.
pub(crate) fn random_psd(r: &mut ChaCha8Rng, n: usize, density: f64) -> Result<SparseMatrix> {
    let p = SparseMatrix::from_triplets(n, n, &sparse_gaussian(r, n, n, density))?;
    // column j of PᵀP is Σ_k P[k][j] · P[k][:]
    let mut acc = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut t = Vec::new();
    for j in 0..n {
        for (k, pkj) in p.col(j) {
            for (i, pki) in p.row(k) {
                if acc[i] == 0.0 {
                    touched.push(i);
                }
                acc[i] += pkj * pki;
            }
        }
        acc[j] += RIDGE;
        if !touched.contains(&j) {
            touched.push(j);
        }
        for &i in &touched {
            t.push((i, j, acc[i]));
            acc[i] = 0.0;
        }
        touched.clear();
    }
    // Mirror the upper triangle so round-off cannot break symmetry.
    let sym: Vec<_> = t
        .iter()
        .filter(|(i, j, _)| i <= j)
        .flat_map(|&(i, j, v)| if i == j { vec![(i, i, v)] } else { vec![(i, j, v), (j, i, v)] })
        .collect();
    SparseMatrix::from_triplets(n, n, &sym)
}

fn gaussian_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(r)).collect()
}

/// Inequality-constrained random QP with `m = 10n` rows and
/// `b = A x₀ + s`, `s ~ U[0, 1]`, so `x₀` is feasible.
pub fn gen_random_qp(spec: &GenSpec) -> Result<Instance> {
    let n = spec.n.max(1);
    let m = 10 * n;
    let mut r = rng(spec.seed);
    let q = random_psd(&mut r, n, spec.density)?;
    let c = gaussian_vec(&mut r, n);
    let a = SparseMatrix::from_triplets(m, n, &sparse_gaussian(&mut r, m, n, spec.density))?;
    let x0 = gaussian_vec(&mut r, n);
    let b: Vec<f64> = a.spmv(&x0)?.into_iter().map(|v| v + r.random::<f64>()).collect();
    let p = QuadraticProgram::with_inequalities("random_qp", q, c, a, b)?;
    Ok(Instance { problem: p, metadata: InstanceMetadata { feasible_point: Some(x0), ..InstanceMetadata::from_spec(spec) } })
}

/// Equality-constrained random QP with `m = ⌈n/2⌉` rows and `b = A x₀`.
pub fn gen_random_eq_qp(spec: &GenSpec) -> Result<Instance> {
    let n = spec.n.max(1);
    let m = n.div_ceil(2);
    let mut r = rng(spec.seed);
    let q = random_psd(&mut r, n, spec.density)?;
    let c = gaussian_vec(&mut r, n);
    let a = SparseMatrix::from_triplets(m, n, &sparse_gaussian(&mut r, m, n, spec.density))?;
    let x0 = gaussian_vec(&mut r, n);
    let b = a.spmv(&x0)?;
    let p = QuadraticProgram::new("random_eq_qp", q, c, SparseMatrix::zeros(0, n), vec![], a, b)?;
    Ok(Instance { problem: p, metadata: InstanceMetadata { feasible_point: Some(x0), ..InstanceMetadata::from_spec(spec) } })
}
