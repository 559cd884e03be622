//! Dense complex linear algebra for small matrices.
//!
//! Everything here is a pure function of its inputs. Orderings are fixed
//! (ascending eigenvalues, pivot-ordered kernels) so that reports are
//! reproducible.

mod eig;
mod matrix;
mod svd;

use thiserror::Error;

pub use eig::{general_eigenvalues, hermitian_eig, HermEig, HERMITIAN_TOL};
pub use matrix::{vec_dot, vec_norm, CMatrix, C64};
pub(crate) use matrix::ZERO;
pub use svd::{
    canonical_basis, lstsq_min_norm, lstsq_min_norm_tol, nullspace, nullspace_floor, svd, LstsqSolution, Svd,
    RANK_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("empty matrix")]
    Empty,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("matrix is singular")]
    Singular,
}

/// Inverse of a square matrix via the SVD; fails when the matrix is
/// numerically singular. Also returns the 2-norm condition number.
pub fn inverse(a: &CMatrix) -> Result<(CMatrix, f64), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let s = svd(a)?;
    let n = a.rows();
    let smax = s.sigma[0];
    let smin = s.sigma[n - 1];
    if smin <= f64::EPSILON * (n as f64) * smax || smin == 0.0 {
        return Err(LinalgError::Singular);
    }
    let inv_sigma: Vec<f64> = s.sigma.iter().map(|x| 1.0 / x).collect();
    let inv = &(&s.v * &CMatrix::from_real_diag(&inv_sigma)) * &s.u.adjoint();
    Ok((inv, smax / smin))
}

/// `exp(A)` for a Hermitian `A` through its eigendecomposition.
pub fn hermitian_exp(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    Ok(hermitian_eig(a)?.apply_fn(f64::exp))
}

/// `exp(A)` for a general square `A` (Padé approximation with scaling and
/// squaring).
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let m = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice()).exp();
    CMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

/// `A^{1/2}` for a Hermitian positive semidefinite `A`.
pub fn hermitian_sqrt(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    Ok(hermitian_eig(a)?.apply_fn(|x| x.max(0.0).sqrt()))
}
