//! Dense linear-algebra helpers shared by the tests and the simulator.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Singular values, descending.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Rank threshold `eps * sigma_max * max(rows, cols)`.
pub(crate) fn rank_tolerance(sigma_max: f64, rows: usize, cols: usize) -> f64 {
    f64::EPSILON * sigma_max * rows.max(cols) as f64
}

pub(crate) fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = singular_values(m);
    let Some(&top) = sv.first() else { return 0 };
    let tol = rank_tolerance(top, m.nrows(), m.ncols());
    sv.iter().filter(|&&s| s > tol).count()
}

pub(crate) fn center_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    out
}

/// Orthonormal basis of the column space of a full-column-rank matrix,
/// from its thin QR decomposition. Fails if the columns are numerically
/// dependent.
pub(crate) fn orthonormal_basis(m: &DMatrix<f64>, name: &str) -> Result<DMatrix<f64>> {
    let qr = m.clone().qr();
    let r = qr.r();
    let sv = singular_values(&r);
    let top = sv.first().copied().unwrap_or(0.0);
    let tol = rank_tolerance(top, m.nrows(), m.ncols());
    let rank = sv.iter().filter(|&&s| s > tol).count();
    if rank < m.ncols() || top == 0.0 {
        return Err(Error::conditioning(
            name,
            format!("rank {rank} is below its {} columns", m.ncols()),
        ));
    }
    Ok(qr.q())
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Eigenvalues of `T^{-1} H` for symmetric `H` and positive definite `T`,
/// descending and clamped to `[0, 1]`, via the Cholesky reduction
/// `L^{-1} H L^{-T}`.
pub(crate) fn relative_roots(h: &DMatrix<f64>, t: &DMatrix<f64>, t_name: &str) -> Result<Vec<f64>> {
    let chol = t
        .clone()
        .cholesky()
        .ok_or_else(|| Error::conditioning(t_name, "not positive definite"))?;
    let l = chol.l();
    let fail = || Error::conditioning(t_name, "triangular solve failed");
    let a = l.solve_lower_triangular(h).ok_or_else(fail)?;
    let mut c = l.solve_lower_triangular(&a.transpose()).ok_or_else(fail)?;
    symmetrize(&mut c);
    let mut roots: Vec<f64> = SymmetricEigen::new(c)
        .eigenvalues
        .iter()
        .map(|&v| v.clamp(0.0, 1.0))
        .collect();
    if roots.iter().any(|v| v.is_nan()) {
        return Err(Error::conditioning(t_name, "eigenvalues are not finite"));
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

/// Column indices of a maximal independent subset chosen greedily by
/// largest remaining residual norm (pivoted Gram-Schmidt), in ascending
/// order, together with the numerical rank.
pub(crate) fn pivoted_columns(x: &DMatrix<f64>) -> (Vec<usize>, usize) {
    let rank = numerical_rank(x);
    let mut resid = x.clone();
    let mut chosen = Vec::with_capacity(rank);
    for _ in 0..rank {
        let (best, _) = (0..resid.ncols())
            .filter(|j| !chosen.contains(j))
            .map(|j| (j, resid.column(j).norm()))
            .fold((usize::MAX, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        chosen.push(best);
        let q = resid.column(best) / resid.column(best).norm();
        for j in 0..resid.ncols() {
            let proj = q.dot(&resid.column(j));
            resid.column_mut(j).axpy(-proj, &q, 1.0);
        }
    }
    chosen.sort_unstable();
    (chosen, rank)
}

pub(crate) fn select_columns(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), cols.len(), |i, j| x[(i, cols[j])])
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
