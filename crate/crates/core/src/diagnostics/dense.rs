//! Small dense helpers for the theory-side diagnostics. Nothing here is on
//! the solve path.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::SparseMatrix;

/// Largest `n` accepted by the dense gap and residual routines.
pub const DENSE_CAP: usize = 2000;

pub(crate) fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(Error::UnsupportedSize { size, cap });
    }
    Ok(())
}

pub fn to_dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.n_rows(), m.n_cols());
    for (i, j, v) in m.triplets() {
        d[(i, j)] = v;
    }
    d
}

/// Spectral decomposition of `I + Q/ξ` for symmetric PSD `Q`, reused for
/// the inverse and inverse-square-root weighted norms.
pub(crate) struct ShiftedSpectrum {
    vectors: DMatrix<f64>,
    /// eigenvalues of `I + Q/ξ`
    values: DVector<f64>,
}

impl ShiftedSpectrum {
    pub fn new(q: &SparseMatrix, xi: f64) -> Self {
        let eig = SymmetricEigen::new(to_dense(q));
        let values = eig.eigenvalues.map(|l| 1.0 + l.max(0.0) / xi);
        ShiftedSpectrum { vectors: eig.eigenvectors, values }
    }

    /// `vᵀ (I + Q/ξ)⁻¹ v`
    pub fn inv_norm_sq(&self, v: &[f64]) -> f64 {
        let coeffs = self.vectors.transpose() * DVector::from_column_slice(v);
        coeffs.iter().zip(self.values.iter()).map(|(c, l)| c * c / l).sum()
    }

    /// `(I + Q/ξ)^{-1/2} v`
    pub fn inv_sqrt_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut coeffs = self.vectors.transpose() * DVector::from_column_slice(v);
        coeffs.iter_mut().zip(self.values.iter()).for_each(|(c, l)| *c /= l.sqrt());
        (&self.vectors * coeffs).iter().copied().collect()
    }
}

/// Exact spectral norm of a symmetric matrix.
pub fn symmetric_norm(q: &SparseMatrix) -> f64 {
    if q.n_rows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(to_dense(q)).eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()))
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(q: &SparseMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(to_dense(q)).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}
