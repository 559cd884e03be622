//! Derivations, Nikolayevsky derivations, center, annihilator and radical,
//! the structure checks for critical points, and the `Γ(λ)` pairs used to
//! build semidirect sums.

mod checks;
mod derivations;
mod gamma;
mod nikolayevsky;
mod substructures;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::cla::{self, vec_dot, vec_norm, CMatrix, LinalgError, C64};
use crate::moment::MomentError;

pub use checks::{structure_checks, ClauseResult, StructureChecks};
pub use derivations::{derivation_algebra, lie_action_matrix, DerivationBasis, DER_TOL};
pub use gamma::{gamma_structure, semidirect_sum, GammaPair, GammaStructure};
pub use nikolayevsky::{nikolayevsky, NikolayevskyResult};
pub use substructures::{eigenspace_split, substructures, EigenSplit, SubstructureReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("algebra is not associative (max associator {0:.2e})")]
    NotAssociative(f64),
    #[error("radical verification failed: {0}")]
    RadicalCheck(String),
    #[error("input is not critical (residual {0:e})")]
    NotCritical(f64),
    #[error("algebra is not nilpotent (radical has dimension {radical} of {dim})")]
    NotNilpotent { radical: usize, dim: usize },
    #[error("derivation system is inconsistent (residual {0:e})")]
    Inconsistent(f64),
    #[error("spectrum is not real and rational: {0}")]
    Spectrum(String),
    #[error("pair family is not closed under products (residual {0:e})")]
    NotClosed(f64),
    #[error("pair family is not closed under adjoints (residual {0:e})")]
    NotAdjointClosed(f64),
    #[error("pairs do not commute with D (residual {0:e})")]
    NotCommuting(f64),
    #[error("pair {0} is not in Γ(λ) (residual {1:e})")]
    NotInGamma(usize, f64),
}

/// Distance from `v` to the span of an orthonormal family.
pub(crate) fn residual_to_span(basis: &[Vec<C64>], v: &[C64]) -> f64 {
    let mut r = v.to_vec();
    for q in basis {
        let c = vec_dot(&r, q);
        for (ri, qi) in r.iter_mut().zip(q) {
            *ri -= c * qi;
        }
    }
    vec_norm(&r)
}

/// Vectors shorter than this count as zero in containment tests; inputs are
/// scaled to order one before these tests run.
const NEGLIGIBLE: f64 = 1e-10;

/// Largest relative distance from the vectors `vs` to `span(basis)`.
pub(crate) fn containment_residual(basis: &[Vec<C64>], vs: &[Vec<C64>]) -> f64 {
    vs.iter()
        .map(|v| {
            let nv = vec_norm(v);
            if nv <= NEGLIGIBLE {
                0.0
            } else {
                residual_to_span(basis, v) / nv
            }
        })
        .fold(0.0, f64::max)
}

/// Orthonormal basis of `span(vs)`, dropping directions whose residual falls
/// below `tol` times the largest input norm.
pub(crate) fn orthonormal_span(vs: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let scale = vs.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    let mut out: Vec<Vec<C64>> = Vec::new();
    if scale == 0.0 {
        return out;
    }
    for v in vs {
        let mut x = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = vec_dot(&x, q);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= c * qi;
                }
            }
        }
        let nx = vec_norm(&x);
        if nx > tol * scale {
            out.push(x.iter().map(|z| z / nx).collect());
        }
    }
    out
}

/// Kernel of `a` with the relative cutoff of [`cla::nullspace`] and an
/// absolute floor of `tol`; callers scale their systems to order one.
pub(crate) fn kernel(a: &CMatrix, tol: f64) -> Result<Vec<Vec<C64>>, StructureError> {
    Ok(cla::nullspace_floor(a, tol, tol)?)
}

/// Combination `Σ x_a B_a` of matrices.
pub(crate) fn combine(basis: &[CMatrix], x: &[C64], n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(n, n);
    for (b, &w) in basis.iter().zip(x) {
        if w != C64::new(0.0, 0.0) {
            out = &out + &b.scale(w);
        }
    }
    out
}
