//! Compressed sparse matrix with both row- and column-major views.
//!
//! Every matrix keeps a CSR layout for `y = M x` and a CSC layout for
//! `y = Mᵀ x`. Both views are sorted by minor index, so the transpose product
//! accumulates in exactly the same order as a product with the explicit
//! transpose.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    // CSR
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    row_vals: Vec<f64>,
    // CSC
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    col_vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate entries are
    /// summed and entries that end up exactly zero are dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(row, col, value) in triplets {
            if row >= n_rows || col >= n_cols {
                return Err(Error::IndexOutOfRange { row, col, n_rows, n_cols });
            }
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("matrix entry ({row}, {col})")));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(sorted.len());
        for (row, col, value) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == row && last.1 == col => last.2 += value,
                _ => merged.push((row, col, value)),
            }
        }
        merged.retain(|t| t.2 != 0.0);
        Ok(Self::from_sorted_unique(n_rows, n_cols, &merged))
    }

    // Triplets must be row-major sorted, unique, nonzero and in range.
    fn from_sorted_unique(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)]) -> Self {
        let nnz = entries.len();
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(nnz);
        let mut row_vals = Vec::with_capacity(nnz);
        let mut col_counts = vec![0usize; n_cols + 1];
        for &(row, col, value) in entries {
            row_ptr[row + 1] += 1;
            col_counts[col + 1] += 1;
            col_idx.push(col);
            row_vals.push(value);
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        for j in 0..n_cols {
            col_counts[j + 1] += col_counts[j];
        }
        let col_ptr = col_counts.clone();
        let mut next = col_counts;
        let mut row_idx = vec![0usize; nnz];
        let mut col_vals = vec![0.0; nnz];
        // Row-major traversal fills each column in increasing row order.
        for &(row, col, value) in entries {
            let slot = next[col];
            row_idx[slot] = row;
            col_vals[slot] = value;
            next[col] += 1;
        }
        SparseMatrix { n_rows, n_cols, row_ptr, col_idx, row_vals, col_ptr, row_idx, col_vals }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_sorted_unique(n_rows, n_cols, &[])
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    /// Diagonal matrix; zero diagonal entries are not stored.
    pub fn diagonal(diag: &[f64]) -> Self {
        let entries: Vec<_> = diag
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| (i, i, v))
            .collect();
        Self::from_sorted_unique(diag.len(), diag.len(), &entries)
    }

    /// Dense row-major input, mostly for tests and small generators.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Dimension(format!(
                    "dense row {i} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n_rows, n_cols, &entries)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.row_vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nnz() == 0
    }

    /// Nonzeros of row `i` as `(col, value)` pairs in increasing column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.row_vals[range].iter().copied())
    }

    /// Nonzeros of column `j` as `(row, value)` pairs in increasing row order.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()].iter().copied().zip(self.col_vals[range].iter().copied())
    }

    /// All entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n_rows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|(col, _)| *col == j).map_or(0.0, |(_, v)| v)
    }

    /// `y = M v`.
    pub fn spmv(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "spmv: vector has length {}, matrix has {} columns",
                v.len(),
                self.n_cols
            )));
        }
        let mut out = vec![0.0; self.n_rows];
        self.spmv_into(v, &mut out);
        Ok(out)
    }

    /// `y = Mᵀ v`.
    pub fn spmv_t(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n_rows {
            return Err(Error::Dimension(format!(
                "spmv_t: vector has length {}, matrix has {} rows",
                v.len(),
                self.n_rows
            )));
        }
        let mut out = vec![0.0; self.n_cols];
        self.spmv_t_into(v, &mut out);
        Ok(out)
    }

    /// Unchecked-length variant of [`spmv`](Self::spmv) writing into `out`.
    pub fn spmv_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.n_cols);
        debug_assert_eq!(out.len(), self.n_rows);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.row_vals[k] * v[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    /// Unchecked-length variant of [`spmv_t`](Self::spmv_t) writing into `out`.
    pub fn spmv_t_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.n_rows);
        debug_assert_eq!(out.len(), self.n_cols);
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc += self.col_vals[k] * v[self.row_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr: self.col_ptr.clone(),
            col_idx: self.row_idx.clone(),
            row_vals: self.col_vals.clone(),
            col_ptr: self.row_ptr.clone(),
            row_idx: self.col_idx.clone(),
            col_vals: self.row_vals.clone(),
        }
    }

    /// `diag(row_scale) · M · diag(col_scale)`.
    pub fn scale(&self, row_scale: &[f64], col_scale: &[f64]) -> Result<SparseMatrix> {
        if row_scale.len() != self.n_rows || col_scale.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "scale: got {}x{} factors for a {}x{} matrix",
                row_scale.len(),
                col_scale.len(),
                self.n_rows,
                self.n_cols
            )));
        }
        let entries: Vec<_> = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| (i, j, row_scale[i] * v * col_scale[j]))
            .collect();
        SparseMatrix::from_triplets(self.n_rows, self.n_cols, &entries)
    }

    /// Stacks `top` over `bottom`.
    pub fn vstack(top: &SparseMatrix, bottom: &SparseMatrix) -> Result<SparseMatrix> {
        if top.n_cols != bottom.n_cols {
            return Err(Error::Dimension(format!(
                "vstack: {} vs {} columns",
                top.n_cols, bottom.n_cols
            )));
        }
        let offset = top.n_rows;
        let mut entries = top.triplets();
        entries.extend(bottom.triplets().into_iter().map(|(i, j, v)| (i + offset, j, v)));
        Ok(SparseMatrix::from_sorted_unique(top.n_rows + bottom.n_rows, top.n_cols, &entries))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.triplets() {
            dense[i][j] = v;
        }
        dense
    }

    /// Checks `|M_ij − M_ji| ≤ rel_tol · max|M|` for every stored entry.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if self.n_rows != self.n_cols {
            return false;
        }
        let scale = self.row_vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
        self.triplets().into_iter().all(|(i, j, v)| (v - self.get(j, i)).abs() <= tol)
    }

    pub fn values(&self) -> &[f64] {
        &self.row_vals
    }

    pub fn row_abs_max(&self, i: usize) -> f64 {
        self.row(i).fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn col_abs_max(&self, j: usize) -> f64 {
        self.col(j).fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row(i).map(|(_, v)| v * v).sum()
    }

    pub fn col_norm_sq(&self, j: usize) -> f64 {
        self.col(j).map(|(_, v)| v * v).sum()
    }

    pub fn row_norm_l1(&self, i: usize) -> f64 {
        self.row(i).map(|(_, v)| v.abs()).sum()
    }

    pub fn col_norm_l1(&self, j: usize) -> f64 {
        self.col(j).map(|(_, v)| v.abs()).sum()
    }

    /// Frobenius norm; an upper bound on the spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.row_vals.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
