//! Mapping from file-level problems (bounds, two-sided rows) to the solver's
//! canonical `A_ineq x ≤ b_ineq`, `A_eq x = b_eq` form.

use super::problem::{QuadraticProgram, RawProblem};
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// Where a canonical row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSource {
    Constraint(usize),
    VariableBound(usize),
}

/// A canonical row is `sign · (source row)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowOrigin {
    pub source: RowSource,
    pub sign: f64,
}

/// Row provenance for a canonicalized problem. Variables are never
/// reordered, so canonical `x` is already in the original column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CanonicalMap {
    pub ineq: Vec<RowOrigin>,
    pub eq: Vec<RowOrigin>,
}

/// Rewrites a [`RawProblem`] into canonical form.
///
/// * `lo = hi` rows become equality rows (free dual).
/// * `a·x ≤ hi` rows are kept, `a·x ≥ lo` rows are negated; ranged rows
///   produce the upper row followed by the negated lower row.
/// * finite variable bounds become singleton rows, upper before lower; fixed
///   variables become singleton equality rows.
/// * rows with both sides infinite are dropped.
pub fn canonicalize(raw: &RawProblem) -> Result<(QuadraticProgram, CanonicalMap)> {
    let n = raw.n();
    let m = raw.m();
    if raw.a.n_rows() != m || raw.a.n_cols() != n || raw.row_upper.len() != m {
        return Err(Error::Dimension("raw constraint block".into()));
    }
    if raw.var_lower.len() != n || raw.var_upper.len() != n || raw.var_names.len() != n {
        return Err(Error::Dimension("raw variable bounds".into()));
    }
    let any_nan = raw.c.iter().chain(&raw.row_lower).chain(&raw.row_upper).chain(&raw.var_lower).chain(&raw.var_upper).any(|v| v.is_nan());
    if any_nan || raw.objective_constant.is_nan() {
        return Err(Error::NonFinite("raw problem data".into()));
    }
    for j in 0..n {
        if raw.var_lower[j] > raw.var_upper[j] {
            return Err(Error::InfeasibleBounds {
                name: raw.var_names[j].clone(),
                lower: raw.var_lower[j],
                upper: raw.var_upper[j],
            });
        }
    }

    let mut ineq_t = Vec::new();
    let mut b_ineq = Vec::new();
    let mut eq_t = Vec::new();
    let mut b_eq = Vec::new();
    let mut map = CanonicalMap::default();

    let mut push_row = |coeffs: &mut dyn Iterator<Item = (usize, f64)>,
                        sign: f64,
                        rhs: f64,
                        equality: bool,
                        source: RowSource| {
        let (trips, rhs_vec, origins) = if equality {
            (&mut eq_t, &mut b_eq, &mut map.eq)
        } else {
            (&mut ineq_t, &mut b_ineq, &mut map.ineq)
        };
        let row = rhs_vec.len();
        trips.extend(coeffs.map(|(j, v)| (row, j, sign * v)));
        rhs_vec.push(sign * rhs);
        origins.push(RowOrigin { source, sign });
    };

    for i in 0..m {
        let (lo, hi) = (raw.row_lower[i], raw.row_upper[i]);
        let src = RowSource::Constraint(i);
        if lo == hi {
            push_row(&mut raw.a.row(i), 1.0, hi, true, src);
            continue;
        }
        if hi.is_finite() {
            push_row(&mut raw.a.row(i), 1.0, hi, false, src);
        }
        if lo.is_finite() {
            push_row(&mut raw.a.row(i), -1.0, lo, false, src);
        }
    }
    for j in 0..n {
        let (lo, hi) = (raw.var_lower[j], raw.var_upper[j]);
        let src = RowSource::VariableBound(j);
        if lo == hi {
            push_row(&mut std::iter::once((j, 1.0)), 1.0, hi, true, src);
            continue;
        }
        if hi.is_finite() {
            push_row(&mut std::iter::once((j, 1.0)), 1.0, hi, false, src);
        }
        if lo.is_finite() {
            push_row(&mut std::iter::once((j, 1.0)), -1.0, lo, false, src);
        }
    }

    let a_ineq = SparseMatrix::from_triplets(b_ineq.len(), n, &ineq_t)?;
    let a_eq = SparseMatrix::from_triplets(b_eq.len(), n, &eq_t)?;
    let mut qp = QuadraticProgram::new(raw.name.clone(), raw.q.clone(), raw.c.clone(), a_ineq, b_ineq, a_eq, b_eq)?;
    qp.objective_constant = raw.objective_constant;
    qp.var_names = Some(raw.var_names.clone());
    Ok((qp, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    fn raw(a: SparseMatrix, row_lower: Vec<f64>, row_upper: Vec<f64>, var_lower: Vec<f64>, var_upper: Vec<f64>) -> RawProblem {
        let n = var_lower.len();
        RawProblem {
            name: "t".into(),
            var_names: (0..n).map(|j| format!("x{j}")).collect(),
            row_names: (0..row_lower.len()).map(|i| format!("r{i}")).collect(),
            q: SparseMatrix::zeros(n, n),
            c: vec![0.0; n],
            objective_constant: 0.0,
            a,
            row_lower,
            row_upper,
            var_lower,
            var_upper,
        }
    }

    #[test]
    fn nonnegative_variable_becomes_sign_flipped_row() {
        let (qp, map) = canonicalize(&raw(SparseMatrix::zeros(0, 1), vec![], vec![], vec![0.0], vec![INF])).unwrap();
        assert_eq!(qp.a_ineq.to_dense(), vec![vec![-1.0]]);
        assert_eq!(qp.b_ineq, vec![0.0]);
        assert_eq!(map.ineq[0], RowOrigin { source: RowSource::VariableBound(0), sign: -1.0 });
    }

    #[test]
    fn greater_row_is_negated() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 1.0]]).unwrap();
        let (qp, _) = canonicalize(&raw(a, vec![1.0], vec![INF], vec![-INF; 2], vec![INF; 2])).unwrap();
        assert_eq!(qp.a_ineq.to_dense(), vec![vec![-1.0, -1.0]]);
        assert_eq!(qp.b_ineq, vec![-1.0]);
        assert_eq!(qp.m_eq(), 0);
    }

    #[test]
    fn ranged_row_splits_in_two() {
        let a = SparseMatrix::from_dense(&[vec![1.0]]).unwrap();
        let (qp, _) = canonicalize(&raw(a, vec![0.0], vec![2.0], vec![-INF], vec![INF])).unwrap();
        assert_eq!(qp.a_ineq.to_dense(), vec![vec![1.0], vec![-1.0]]);
        assert_eq!(qp.b_ineq, vec![2.0, 0.0]);
    }

    #[test]
    fn equality_and_fixed_rows_go_to_eq_block() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0]]).unwrap();
        let (qp, map) = canonicalize(&raw(a, vec![3.0], vec![3.0], vec![1.0, -INF], vec![1.0, INF])).unwrap();
        assert_eq!(qp.m_ineq(), 0);
        assert_eq!(qp.a_eq.to_dense(), vec![vec![1.0, 2.0], vec![1.0, 0.0]]);
        assert_eq!(qp.b_eq, vec![3.0, 1.0]);
        assert_eq!(map.eq[1].source, RowSource::VariableBound(0));
    }

    #[test]
    fn infeasible_bounds_rejected() {
        let r = raw(SparseMatrix::zeros(0, 1), vec![], vec![], vec![2.0], vec![1.0]);
        assert!(matches!(canonicalize(&r), Err(Error::InfeasibleBounds { .. })));
    }

    #[test]
    fn nan_rejected() {
        let r = raw(SparseMatrix::zeros(0, 1), vec![], vec![], vec![f64::NAN], vec![1.0]);
        assert!(matches!(canonicalize(&r), Err(Error::NonFinite(_))));
    }

    fn bound_pair() -> impl Strategy<Value = (f64, f64)> {
        prop_oneof![
            Just((-INF, INF)),
            (-3.0..3.0f64).prop_map(|u| (-INF, u)),
            (-3.0..3.0f64).prop_map(|l| (l, INF)),
            (-3.0..3.0f64, 0.0..3.0f64).prop_map(|(l, w)| (l, l + w)),
            (-3.0..3.0f64).prop_map(|v| (v, v)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn feasible_set_is_preserved(
            dense in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 3), 0..5),
            row_bounds in prop::collection::vec(bound_pair(), 5),
            var_bounds in prop::collection::vec(bound_pair(), 3),
            points in prop::collection::vec(prop::collection::vec(-4.0..4.0f64, 3), 20),
        ) {
            let m = dense.len();
            let a = if m == 0 { SparseMatrix::zeros(0, 3) } else { SparseMatrix::from_dense(&dense).unwrap() };
            let r = raw(
                a,
                row_bounds[..m].iter().map(|b| b.0).collect(),
                row_bounds[..m].iter().map(|b| b.1).collect(),
                var_bounds.iter().map(|b| b.0).collect(),
                var_bounds.iter().map(|b| b.1).collect(),
            );
            let (qp, _) = canonicalize(&r).unwrap();
            for x in &points {
                prop_assert_eq!(r.is_feasible(x, 1e-12), qp.is_feasible(x, 1e-12));
            }
            // Points constructed on the boundary of the raw set.
            let corner: Vec<f64> = var_bounds.iter().map(|b| if b.0.is_finite() { b.0 } else if b.1.is_finite() { b.1 } else { 0.0 }).collect();
            prop_assert_eq!(r.is_feasible(&corner, 1e-12), qp.is_feasible(&corner, 1e-12));
        }
    }
}
