//! Lower-bound instances built on the tridiagonal chain.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{Instance, InstanceMetadata, ProblemClass};
use crate::error::{Error, Result};
use crate::model::{PrimalDualPoint, QuadraticProgram, SparseMatrix};

/// `H = ((L−μ)/4)·tridiag(−1, 2, −1) + μI` and `h = −((L−μ)/4)·e₁`.
///
/// The spectrum of `H` lies strictly inside `[μ, L]` and tends to both ends
/// as `n` grows.
pub fn gen_nesterov_chain(n: usize, mu: f64, l: f64) -> Result<(SparseMatrix, Vec<f64>)> {
    check_params(n, mu, l)?;
    let s = (l - mu) / 4.0;
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, 2.0 * s + mu));
        if i + 1 < n {
            t.push((i, i + 1, -s));
            t.push((i + 1, i, -s));
        }
    }
    let mut h = vec![0.0; n];
    h[0] = -s;
    Ok((SparseMatrix::from_triplets(n, n, &t)?, h))
}

fn check_params(n: usize, mu: f64, l: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("chain length must be at least 2, got {n}")));
    }
    if !(mu > 0.0 && l > mu && l.is_finite()) {
        return Err(Error::InvalidArgument(format!("need L > μ > 0, got μ={mu}, L={l}")));
    }
    Ok(())
}

/// Solves `Hx = r` for the symmetric tridiagonal chain matrix (Thomas
/// algorithm; `H` is diagonally dominant so no pivoting is needed).
pub fn solve_tridiagonal(h: &SparseMatrix, r: &[f64]) -> Vec<f64> {
    let n = r.len();
    let diag: Vec<f64> = (0..n).map(|i| h.get(i, i)).collect();
    let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| h.get(i, i + 1)).collect();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for i in 0..n {
        let lower = if i > 0 { off[i - 1] } else { 0.0 };
        let denom = diag[i] - if i > 0 { lower * cp[i - 1] } else { 0.0 };
        cp[i] = if i + 1 < n { off[i] / denom } else { 0.0 };
        dp[i] = (r[i] - if i > 0 { lower * dp[i - 1] } else { 0.0 }) / denom;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = dp[i] - if i + 1 < n { cp[i] * x[i + 1] } else { 0.0 };
    }
    x
}

fn dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.n_rows(), m.n_cols());
    for (i, j, v) in m.triplets() {
        d[(i, j)] = v;
    }
    d
}

/// Bilinear game from explicit `(H, h)`: `Q = 0`, `c = 0` and equality rows
/// `H^{1/2} x = H^{-1/2} h` with free duals. The solution is
/// `x* = H⁻¹h`, `y* = 0`.
pub fn bilinear_game_from(h_mat: &SparseMatrix, h: &[f64]) -> Result<Instance> {
    let n = h.len();
    let eig = SymmetricEigen::new(dense(h_mat));
    let lmin = eig.eigenvalues.min();
    if !(lmin > 0.0) {
        return Err(Error::InvalidArgument(format!("H must be positive definite, smallest eigenvalue {lmin}")));
    }
    let v = &eig.eigenvectors;
    let root = v * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * v.transpose();
    let coeff = v.transpose() * DVector::from_column_slice(h);
    let b = v * coeff.zip_map(&eig.eigenvalues, |c, l| c / l.sqrt());
    let x_star = v * coeff.zip_map(&eig.eigenvalues, |c, l| c / l);

    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            // symmetrize to keep round-off from breaking exact symmetry
            let val = 0.5 * (root[(i, j)] + root[(j, i)]);
            if val != 0.0 {
                t.push((i, j, val));
            }
        }
    }
    let p = QuadraticProgram::new(
        "bilinear_game",
        SparseMatrix::zeros(n, n),
        vec![0.0; n],
        SparseMatrix::zeros(0, n),
        vec![],
        SparseMatrix::from_triplets(n, n, &t)?,
        b.iter().copied().collect(),
    )?;
    let star = PrimalDualPoint { x: x_star.iter().copied().collect(), y_ineq: vec![], y_eq: vec![0.0; n] };
    let lmax = eig.eigenvalues.max();
    let meta = InstanceMetadata {
        measured_condition: Some(lmax / lmin),
        feasible_point: Some(star.x.clone()),
        optimal_objective: Some(0.0),
        known_optimum: Some(star),
        ..InstanceMetadata::new(ProblemClass::BilinearGame, n, 0)
    };
    Ok(Instance { problem: p, metadata: meta })
}

pub fn gen_bilinear_game(n: usize, mu: f64, l: f64) -> Result<Instance> {
    let (h_mat, h) = gen_nesterov_chain(n, mu, l)?;
    let mut inst = bilinear_game_from(&h_mat, &h)?;
    inst.metadata.mu = Some(mu);
    inst.metadata.l = Some(l);
    Ok(inst)
}

/// Strongly convex instance from explicit `(H, h)`: variables `(x̃, x₀)`,
/// `Q = diag(H, 0)`, `c = (h, 0)`, equality rows `A x = 0` where `A` is zero
/// except for `A[n][n] = corner`. The solution is `x̃* = −H⁻¹h`, `x₀* = 0`,
/// `y* = 0`.
pub fn sc_minimax_from(h_mat: &SparseMatrix, h: &[f64], corner: f64, x_tilde_star: Vec<f64>) -> Result<Instance> {
    let n = h.len();
    if !(corner > 0.0) {
        return Err(Error::InvalidArgument("corner entry must be positive".into()));
    }
    let q = SparseMatrix::from_triplets(n + 1, n + 1, &h_mat.triplets())?;
    let mut c = h.to_vec();
    c.push(0.0);
    let a = SparseMatrix::from_triplets(n + 1, n + 1, &[(n, n, corner)])?;
    let p = QuadraticProgram::new(
        "sc_minimax",
        q,
        c,
        SparseMatrix::zeros(0, n + 1),
        vec![],
        a,
        vec![0.0; n + 1],
    )?;
    let mut x = x_tilde_star;
    x.push(0.0);
    let star = PrimalDualPoint { x, y_ineq: vec![], y_eq: vec![0.0; n + 1] };
    let objective = p.objective(&star.x);
    let meta = InstanceMetadata {
        feasible_point: Some(star.x.clone()),
        optimal_objective: Some(objective),
        known_optimum: Some(star),
        ..InstanceMetadata::new(ProblemClass::ScMinimax, n, 0)
    };
    Ok(Instance { problem: p, metadata: meta })
}

/// Chain-based strongly convex instance; the corner entry is `√(Lμ)` with
/// the nominal `L`.
pub fn gen_sc_minimax(n: usize, mu: f64, l: f64) -> Result<Instance> {
    let (h_mat, h) = gen_nesterov_chain(n, mu, l)?;
    let neg: Vec<f64> = h.iter().map(|v| -v).collect();
    let x_star = solve_tridiagonal(&h_mat, &neg);
    let mut inst = sc_minimax_from(&h_mat, &h, (l * mu).sqrt(), x_star)?;
    inst.metadata.mu = Some(mu);
    inst.metadata.l = Some(l);
    if n <= crate::diagnostics::DENSE_CAP {
        let ev = crate::diagnostics::symmetric_eigenvalues(&h_mat);
        inst.metadata.measured_condition = Some(ev[n - 1] / ev[0]);
    }
    Ok(inst)
}
