//! Dense helpers on top of nalgebra's SVD.

use nalgebra::{DMatrix, DVector, SVD};

/// nalgebra's SVD does not terminate on NaN or infinite entries.
pub(crate) fn svd(m: DMatrix<f64>, compute_u: bool, compute_v: bool) -> SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    assert!(m.iter().all(|v| v.is_finite()), "SVD of a matrix with non-finite entries");
    m.svd(compute_u, compute_v)
}

fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    svd(m.clone(), false, false).singular_values
}

/// Number of singular values above `rel_tol * σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let smax = s.max();
    if !(smax > 0.0) {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * smax).count()
}

/// Minimal-norm least-squares solution of `A x = b` through the
/// pseudo-inverse, discarding singular values below `rel_cutoff * σ_max`.
pub fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>, rel_cutoff: f64) -> DVector<f64> {
    let (_, cols) = a.shape();
    if a.is_empty() {
        return DVector::zeros(cols);
    }
    let svd = svd(a.clone(), true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.max();
    let mut x = DVector::zeros(cols);
    if !(smax > 0.0) {
        return x;
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > rel_cutoff * smax {
            let coeff = u.column(k).dot(b) / s;
            x.axpy(coeff, &vt.row(k).transpose(), 1.0);
        }
    }
    x
}

/// Orthonormal basis (columns) of the right null space of `m`: right
/// singular vectors with `σ <= rel_tol * σ_max`, plus the directions a
/// wide matrix cannot reach.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad to square so the SVD returns a full set of right singular vectors.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(padded, false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| !(smax > 0.0) || s <= rel_tol * smax)
        .map(|(k, _)| k)
        .collect();
    DMatrix::from_fn(cols, keep.len(), |i, j| vt[(keep[j], i)])
}

/// Orthonormal basis of the column space of `m` (relative tolerance on σ).
pub fn orthonormal_columns(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = svd(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax > 0.0 && s > rel_tol * smax)
        .map(|(k, _)| k)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns and equal column count.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let cross = a.transpose() * b;
    let smin = singular_values(&cross).min().clamp(0.0, 1.0);
    // acos loses accuracy near 1; use the sine of the gap instead.
    let residual = b - a * (a.transpose() * b);
    let sin_max = singular_values(&residual).max().clamp(0.0, 1.0);
    if smin > 0.9 {
        sin_max.asin()
    } else {
        smin.acos()
    }
}

/// Indices of a maximal independent subset of columns, chosen greedily in
/// order: a column is kept when its component orthogonal to the kept ones
/// exceeds `rel_tol` times its own norm. Two Gram-Schmidt passes.
pub fn greedy_independent_columns(m: &DMatrix<f64>, rel_tol: f64) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut keep = Vec::new();
    for (j, col) in m.column_iter().enumerate() {
        let norm = col.norm();
        if !(norm > 0.0) {
            continue;
        }
        let mut r: DVector<f64> = col.into_owned();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        let rn = r.norm();
        if rn > rel_tol * norm {
            basis.push(r / rn);
            keep.push(j);
        }
    }
    keep
}

/// `max_ij |a_ij|`.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}
