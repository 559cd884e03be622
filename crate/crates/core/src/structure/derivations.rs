use serde::Serialize;

use crate::algebra::AlgebraTensor;
use crate::cla::{CMatrix, C64};

use super::{containment_residual, kernel, residual_to_span, StructureError};

/// Default relative rank tolerance for exact inputs.
pub const DER_TOL: f64 = 1e-9;

/// Orthonormal basis (Frobenius inner product) of `Der(μ)`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivationBasis {
    pub basis: Vec<CMatrix>,
}

impl DerivationBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `max ‖B.μ‖ / ‖μ‖` over the basis.
    pub fn max_residual(&self, mu: &AlgebraTensor) -> f64 {
        let nm = mu.norm().max(f64::MIN_POSITIVE);
        self.basis
            .iter()
            .map(|b| mu.act_lie(b).map_or(f64::INFINITY, |t| t.norm() / nm))
            .fold(0.0, f64::max)
    }

    /// Relative distance of `a` from the span of the basis.
    pub fn distance(&self, a: &CMatrix) -> f64 {
        let vs: Vec<Vec<C64>> = self.basis.iter().map(|b| b.to_vec()).collect();
        containment_residual(&vs, &[a.to_vec()])
    }

    /// Largest distance of a commutator `[B_i, B_j]` from the span, relative
    /// to `‖B_i‖ ‖B_j‖`.
    pub fn bracket_residual(&self) -> f64 {
        let vs: Vec<Vec<C64>> = self.basis.iter().map(|b| b.to_vec()).collect();
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                let r = residual_to_span(&vs, &a.commutator(b).to_vec());
                worst = worst.max(r / (a.norm_fro() * b.norm_fro()));
            }
        }
        worst
    }
}

/// Matrix of `A ↦ A.μ` from `gl(n)` (row-major `A`) to `V_n`, size `n³ × n²`.
pub fn lie_action_matrix(mu: &AlgebraTensor) -> CMatrix {
    let n = mu.dim();
    let row = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut m = CMatrix::zeros(n * n * n, n * n);
    for p in 0..n {
        for q in 0..n {
            let col = p * n + q;
            for i in 0..n {
                for j in 0..n {
                    // E_pq μ(e_i, e_j)
                    m[(row(i, j, p), col)] += mu.get(i, j, q);
                    for k in 0..n {
                        // −μ(E_pq e_i, e_j) and −μ(e_i, E_pq e_j)
                        if i == q {
                            m[(row(i, j, k), col)] -= mu.get(p, j, k);
                        }
                        if j == q {
                            m[(row(i, j, k), col)] -= mu.get(i, p, k);
                        }
                    }
                }
            }
        }
    }
    m
}

/// `Der(μ)` as the kernel of the infinitesimal action.
pub fn derivation_algebra(mu: &AlgebraTensor, tol: f64) -> Result<DerivationBasis, StructureError> {
    let n = mu.dim();
    let unit = if mu.is_zero() { mu.clone() } else { mu.normalized()? };
    let raw = kernel(&lie_action_matrix(&unit), tol)?;
    Ok(DerivationBasis {
        basis: raw.iter().map(|v| CMatrix::from_vec_square(n, v)).collect(),
    })
}
