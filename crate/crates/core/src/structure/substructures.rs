use serde::Serialize;

use crate::algebra::{AlgebraTensor, ASSOC_TOL};
use crate::cla::{self, CMatrix, C64, ZERO};

use super::{containment_residual, kernel, orthonormal_span, StructureError};

#[derive(Clone, Debug, Serialize)]
pub struct SubstructureReport {
    pub center: Vec<Vec<C64>>,
    pub annihilator: Vec<Vec<C64>>,
    pub radical: Vec<Vec<C64>>,
}

/// Eigenvectors of a Hermitian `D` grouped by the sign of the eigenvalue.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EigenSplit {
    pub minus: Vec<Vec<C64>>,
    pub zero: Vec<Vec<C64>>,
    pub plus: Vec<Vec<C64>>,
}

/// Center, annihilator and radical of an associative algebra.
///
/// The radical is the kernel of the trace form `(x, y) ↦ tr L⁺_{xy}` of the
/// unitization, restricted to the algebra, and is then checked to be a
/// nilpotent ideal.
pub fn substructures(mu: &AlgebraTensor, tol: f64) -> Result<SubstructureReport, StructureError> {
    let n = mu.dim();
    let mu = if mu.is_zero() { mu.clone() } else { mu.normalized()? };
    let (ok, worst) = mu.is_associative(ASSOC_TOL.max(tol * 1e-2));
    if !ok {
        return Err(StructureError::NotAssociative(worst));
    }

    // x ∈ C iff Σ_i x_i (c_ij^k − c_ji^k) = 0
    let comm = CMatrix::from_fn(n * n, n, |r, i| {
        let (j, k) = (r / n, r % n);
        mu.get(i, j, k) - mu.get(j, i, k)
    });
    let center = kernel(&comm, tol)?;

    let ann = CMatrix::from_fn(2 * n * n, n, |r, i| {
        let (j, k) = ((r % (n * n)) / n, r % n);
        if r < n * n {
            mu.get(i, j, k)
        } else {
            mu.get(j, i, k)
        }
    });
    let annihilator = kernel(&ann, tol)?;

    // t_k = tr L⁺_{e_k}; tr(L⁺_{e_i} L⁺_{e_l}) = Σ_k c_il^k t_k
    let t: Vec<C64> = (0..n).map(|k| (0..n).map(|j| mu.get(k, j, j)).sum()).collect();
    let form = CMatrix::from_fn(n + 1, n, |y, i| {
        if y == 0 {
            t[i]
        } else {
            (0..n).map(|k| mu.get(i, y - 1, k) * t[k]).sum()
        }
    });
    let radical = kernel(&form, tol)?;
    verify_radical(&mu, &radical, (tol * 1e2).max(1e-8))?;

    Ok(SubstructureReport {
        center,
        annihilator,
        radical,
    })
}

fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; n];
    v[i] = C64::new(1.0, 0.0);
    v
}

fn verify_radical(mu: &AlgebraTensor, radical: &[Vec<C64>], tol: f64) -> Result<(), StructureError> {
    let n = mu.dim();
    if radical.is_empty() {
        return Ok(());
    }
    let mut products = Vec::new();
    for r in radical {
        for j in 0..n {
            let e = unit(n, j);
            products.push(mu.product(r, &e));
            products.push(mu.product(&e, r));
        }
    }
    let res = containment_residual(radical, &products);
    if res > tol {
        return Err(StructureError::RadicalCheck(format!("not an ideal (residual {res:e})")));
    }
    // N^{k+1} = span(N^k · N); must vanish by depth n + 1
    let mut power = radical.to_vec();
    for _ in 0..n {
        let prods: Vec<Vec<C64>> = power
            .iter()
            .flat_map(|p| radical.iter().map(move |r| mu.product(p, r)))
            .filter(|v| cla::vec_norm(v) > tol)
            .collect();
        power = orthonormal_span(&prods, tol);
        if power.is_empty() {
            return Ok(());
        }
    }
    Err(StructureError::RadicalCheck(format!(
        "products of depth {} do not vanish",
        n + 1
    )))
}

/// Splits `C^n` into the negative, zero (`|λ| ≤ tol`) and positive
/// eigenspaces of a Hermitian `D`.
pub fn eigenspace_split(d: &CMatrix, tol: f64) -> Result<EigenSplit, StructureError> {
    let eig = cla::hermitian_eig(d)?;
    let mut out = EigenSplit::default();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.vector(k);
        if lam < -tol {
            out.minus.push(v);
        } else if lam > tol {
            out.plus.push(v);
        } else {
            out.zero.push(v);
        }
    }
    Ok(out)
}
