//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix sorted by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors as columns, in the same order as `values`.
    pub vectors: DMatrix<f64>,
}

/// Full symmetric eigendecomposition, ascending. Each eigenvector's
/// largest-magnitude entry is made positive (first such entry on ties).
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SortedEigen> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch("eigendecomposition needs a square matrix".into()));
    }
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::EigFailure)?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite())
        || eig.eigenvectors.iter().any(|v| !v.is_finite())
    {
        return Err(Error::EigFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        stabilize_sign(col.as_mut_slice());
        vectors.set_column(dst, &col);
    }
    Ok(SortedEigen { values, vectors })
}

/// Eigenvectors of the `k` smallest eigenvalues, as an N×k matrix.
pub fn smallest_eigenvectors(m: &DMatrix<f64>, k: usize) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if k > m.nrows() {
        return Err(Error::InvalidConfig(format!(
            "requested {k} eigenvectors of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let eig = symmetric_eigen(m)?;
    Ok((
        eig.values.rows(0, k).clone_owned(),
        eig.vectors.columns(0, k).clone_owned(),
    ))
}

pub(crate) fn stabilize_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Cosines of the principal angles between the column spans of two
/// matrices with orthonormal columns, descending.
pub fn principal_cosines(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let m = a.transpose() * b;
    let mut s: Vec<f64> = m.singular_values().iter().map(|v| v.min(1.0)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest principal angle (radians) between two orthonormal column spans
/// of equal dimension.
pub fn largest_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    // The sine form is accurate for tiny angles, unlike acos of the cosine.
    let pa = a * a.transpose();
    let proj_b = &pa * b;
    let resid = b - proj_b;
    let s = resid.singular_values().iter().fold(0.0_f64, |m, v| m.max(*v));
    s.min(1.0).asin()
}
