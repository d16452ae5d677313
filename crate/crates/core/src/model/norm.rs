//! Spectral norm estimation by power iteration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::sparse::SparseMatrix;

/// Multiplier applied to estimated norms before they enter step-size rules.
pub const NORM_SAFETY_FACTOR: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimateOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for NormEstimateOptions {
    fn default() -> Self {
        NormEstimateOptions { max_iters: 5000, tol: 1e-4, seed: 0 }
    }
}

/// Estimates `‖M‖₂`.
///
/// Symmetric matrices are iterated directly; anything else goes through
/// `MᵀM` and the square root of the dominant eigenvalue is returned. Iteration
/// stops once the Rayleigh quotient changes by at most `tol` relative to its
/// value. An all-zero matrix yields 0.
pub fn estimate_op_norm(m: &SparseMatrix, opts: &NormEstimateOptions) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let symmetric = m.is_symmetric(1e-12);
    let dim = m.n_cols();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);

    let mut tmp = vec![0.0; m.n_rows()];
    let mut w = vec![0.0; dim];
    let apply = |v: &[f64], tmp: &mut [f64], w: &mut [f64]| {
        if symmetric {
            m.spmv_into(v, w);
        } else {
            m.spmv_into(v, tmp);
            m.spmv_t_into(tmp, w);
        }
    };

    let mut lambda = 0.0f64;
    for iter in 0..opts.max_iters.max(1) {
        apply(&v, &mut tmp, &mut w);
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().abs();
        let w_norm = norm2(&w);
        if w_norm == 0.0 {
            // Start vector landed in the null space; draw a fresh one.
            v.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
            normalize(&mut v);
            continue;
        }
        let converged = iter > 0 && (rayleigh - lambda).abs() <= opts.tol * rayleigh;
        lambda = rayleigh;
        if converged {
            break;
        }
        v.iter_mut().zip(&w).for_each(|(a, b)| *a = b / w_norm);
    }
    if symmetric {
        lambda
    } else {
        lambda.sqrt()
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_norm() {
        let opts = NormEstimateOptions::default();
        let est = estimate_op_norm(&SparseMatrix::diagonal(&[3.0, 1.0]), &opts);
        assert!((est - 3.0).abs() <= 3.0 * opts.tol, "{est}");
    }

    #[test]
    fn identity_norm() {
        let est = estimate_op_norm(&SparseMatrix::identity(5), &NormEstimateOptions::default());
        assert!((est - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_nonsymmetric() {
        let m = SparseMatrix::from_dense(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let opts = NormEstimateOptions::default();
        let est = estimate_op_norm(&m, &opts);
        assert!((est - 2.0).abs() <= 2.0 * opts.tol, "{est}");
    }

    #[test]
    fn zero_matrix_is_zero() {
        assert_eq!(estimate_op_norm(&SparseMatrix::zeros(3, 4), &NormEstimateOptions::default()), 0.0);
    }
}
