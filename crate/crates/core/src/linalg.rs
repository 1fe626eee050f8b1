//! Small dense-factorization helpers shared by the solvers. nalgebra does
//! the factorizations; everything here just adapts ndarray storage.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};

pub(crate) fn to_na(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub(crate) fn to_na_vec(v: &Array1<f64>) -> DVector<f64> {
    DVector::from_iterator(v.len(), v.iter().copied())
}

pub(crate) fn from_na(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
/// Returns `None` when the factorization fails (not PD within rounding).
pub(crate) fn spd_inverse(g: &Array2<f64>) -> Option<Array2<f64>> {
    let chol = to_na(g).cholesky()?;
    Some(from_na(&chol.inverse()))
}

/// Pseudo-inverse of a symmetric matrix through its eigendecomposition,
/// zeroing modes below `rcond * max|eigenvalue|`.
pub(crate) fn sym_pinv(g: &Array2<f64>, rcond: f64) -> Array2<f64> {
    let eig = to_na(g).symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = rcond * max;
    let k = g.nrows();
    let mut out = DMatrix::zeros(k, k);
    for (idx, val) in eig.eigenvalues.iter().enumerate() {
        if val.abs() > cut {
            let v = eig.eigenvectors.column(idx);
            out += v * v.transpose() / *val;
        }
    }
    from_na(&out)
}

/// Least squares `min ||y - A x||` returning the minimum-norm solution when
/// `A^T A` is rank-deficient. The second value reports whether the fallback
/// was taken.
pub(crate) fn lstsq_min_norm(a: &Array2<f64>, y: &Array1<f64>) -> (Array1<f64>, bool) {
    let na = to_na(a);
    let ny = to_na_vec(y);
    let gram = na.transpose() * &na;
    if let Some(chol) = gram.clone().cholesky() {
        // A numerically "successful" factorization of a near-singular Gram
        // matrix shows up as a tiny pivot on the Cholesky diagonal.
        let k = gram.nrows();
        let diag_max = (0..k).map(|i| gram[(i, i)]).fold(0.0f64, f64::max);
        let pivot_min = (0..k).map(|i| chol.l_dirty()[(i, i)]).fold(f64::MAX, f64::min);
        if pivot_min * pivot_min > 1e-12 * diag_max {
            let x = chol.solve(&(na.transpose() * &ny));
            if x.iter().all(|v| v.is_finite()) {
                return (Array1::from_iter(x.iter().copied()), false);
            }
        }
    }
    let svd = na.clone().svd(true, true);
    let eps = f64::EPSILON * a.nrows().max(a.ncols()) as f64 * svd.singular_values.max();
    let x = svd.solve(&ny, eps).expect("SVD solve cannot fail with U, V computed");
    (Array1::from_iter(x.iter().copied()), true)
}
