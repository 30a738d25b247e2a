//! Dense complex decompositions backed by `faer`.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::{CMatrix, CVector};

fn to_faer(m: &CMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Minimum-norm least-squares solution of `a x = b`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LeastSquares {
    pub x: CVector,
    /// `σ_max / σ_min` over all singular values (infinite if rank deficient).
    pub condition: f64,
    /// `‖a x - b‖`.
    pub residual: f64,
}

/// Singular values below `rcond · σ_max` are treated as zero.
pub(crate) fn least_squares(a: &CMatrix, b: &CVector, rcond: f64) -> Result<LeastSquares> {
    let svd = to_faer(a).thin_svd().map_err(|_| Error::Singular)?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = s.nrows();
    let smax = (0..k).map(|i| s[i].re).fold(0.0, f64::max);
    let smin = (0..k).map(|i| s[i].re).fold(f64::INFINITY, f64::min);
    let cutoff = rcond * smax;
    let mut x = CVector::zeros(a.ncols());
    for i in 0..k {
        let sigma = s[i].re;
        if sigma <= cutoff || sigma == 0.0 {
            continue;
        }
        let mut proj = Complex64::from(0.0);
        for r in 0..a.nrows() {
            proj += u[(r, i)].conj() * b[r];
        }
        proj /= sigma;
        for c in 0..a.ncols() {
            x[c] += v[(c, i)] * proj;
        }
    }
    let residual = (a * &x - b).norm();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    Ok(LeastSquares { x, condition, residual })
}

/// Eigenvalues and right eigenvectors (as columns) of a general complex matrix.
pub(crate) fn eigen(m: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = m.nrows();
    let eig = to_faer(m)
        .eigen()
        .map_err(|e| Error::Invalid(format!("eigendecomposition failed: {e:?}")))?;
    let (s, u) = (eig.S().column_vector(), eig.U());
    let values = (0..n).map(|i| s[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    Ok((values, vectors))
}
