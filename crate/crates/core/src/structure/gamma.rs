use serde::Serialize;

use crate::algebra::{AlgebraError, AlgebraTensor, ASSOC_TOL};
use crate::cla::{self, CMatrix, C64, ZERO};
use crate::moment::CriticalReport;

use super::{combine, containment_residual, kernel, orthonormal_span, substructures, StructureError, DER_TOL};

const PAIR_TOL: f64 = 1e-8;

/// A pair `(Φ, Ψ)` acting on the left and on the right of a nilpotent algebra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaPair {
    pub phi: CMatrix,
    pub psi: CMatrix,
}

impl GammaPair {
    pub fn new(phi: CMatrix, psi: CMatrix) -> Self {
        Self { phi, psi }
    }

    /// `(Φ₁, Ψ₁)(Φ₂, Ψ₂) = (Φ₁Φ₂, Ψ₂Ψ₁)`.
    pub fn product(&self, other: &Self) -> Self {
        Self::new(&self.phi * &other.phi, &other.psi * &self.psi)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.phi.adjoint(), self.psi.adjoint())
    }

    pub fn to_vec(&self) -> Vec<C64> {
        let mut v = self.phi.to_vec();
        v.extend(self.psi.to_vec());
        v
    }

    /// Largest violation of `Φ ∈ L(λ)`, `Ψ ∈ R(λ)` and
    /// `λ(·, Φ·) = λ(Ψ·, ·)`, relative to `‖λ‖ (‖Φ‖ + ‖Ψ‖)`.
    pub fn defect(&self, lam: &AlgebraTensor) -> f64 {
        let n = lam.dim();
        let scale = lam.norm() * (self.phi.norm_fro() + self.psi.norm_fro());
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lij: Vec<C64> = (0..n).map(|k| lam.get(i, j, k)).collect();
                let img = |m: &CMatrix, v: usize| m.column(v);
                let e = |v: usize| {
                    let mut x = vec![ZERO; n];
                    x[v] = C64::new(1.0, 0.0);
                    x
                };
                let phi_l = self.phi.mul_vec(&lij);
                let psi_l = self.psi.mul_vec(&lij);
                let a = lam.product(&img(&self.phi, i), &e(j));
                let b = lam.product(&e(i), &img(&self.psi, j));
                let c = lam.product(&e(i), &img(&self.phi, j));
                let d = lam.product(&img(&self.psi, i), &e(j));
                for k in 0..n {
                    worst = worst
                        .max((phi_l[k] - a[k]).norm())
                        .max((psi_l[k] - b[k]).norm())
                        .max((c[k] - d[k]).norm());
                }
            }
        }
        worst / scale
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaStructure {
    pub l_basis: Vec<CMatrix>,
    pub r_basis: Vec<CMatrix>,
    pub gamma_l: Vec<CMatrix>,
    pub gamma_r: Vec<CMatrix>,
    pub gamma: Vec<GammaPair>,
    /// Set for the zero algebra, where every intertwiner condition is empty.
    pub degenerate: bool,
    /// Largest relative distance of a product of basis pairs from `Γ(λ)`.
    pub closure_residual: f64,
}

impl GammaStructure {
    /// Relative distance of a pair from `Γ(λ)`.
    pub fn distance(&self, pair: &GammaPair) -> f64 {
        let vs: Vec<Vec<C64>> = self.gamma.iter().map(GammaPair::to_vec).collect();
        containment_residual(&vs, &[pair.to_vec()])
    }
}

fn matrices(n: usize, raw: &[Vec<C64>]) -> Vec<CMatrix> {
    raw.iter().map(|v| CMatrix::from_vec_square(n, v)).collect()
}

/// Linear conditions on an unknown `Φ` (row-major), one row per `(i, j, k)`.
/// `left` selects `Φ(λ(X, Y)) = λ(ΦX, Y)`, otherwise `Φ(λ(X, Y)) = λ(X, ΦY)`.
fn intertwiner_system(lam: &AlgebraTensor, left: bool) -> CMatrix {
    let n = lam.dim();
    let mut m = CMatrix::zeros(n * n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let row = (i * n + j) * n + k;
                for l in 0..n {
                    // Σ_l Φ_kl c_ij^l
                    m[(row, k * n + l)] += lam.get(i, j, l);
                    if left {
                        // − Σ_l Φ_li c_lj^k
                        m[(row, l * n + i)] -= lam.get(l, j, k);
                    } else {
                        // − Σ_l Φ_lj c_il^k
                        m[(row, l * n + j)] -= lam.get(i, l, k);
                    }
                }
            }
        }
    }
    m
}

/// Elements of `span(family)` commuting with every element of `others`.
fn commutant(family: &[CMatrix], others: &[CMatrix], n: usize) -> Result<Vec<CMatrix>, StructureError> {
    if family.is_empty() || others.is_empty() {
        return Ok(family.to_vec());
    }
    let cols: Vec<Vec<C64>> = family
        .iter()
        .map(|a| others.iter().flat_map(|b| a.commutator(b).to_vec()).collect())
        .collect();
    let sys = CMatrix::from_columns(others.len() * n * n, &cols);
    if sys.max_abs() <= 1e-12 {
        return Ok(family.to_vec());
    }
    Ok(kernel(&sys, DER_TOL)?.iter().map(|x| combine(family, x, n)).collect())
}

/// `L(λ)`, `R(λ)`, `Γ_l`, `Γ_r` and `Γ(λ)` for a nilpotent `λ`.
pub fn gamma_structure(lam: &AlgebraTensor) -> Result<GammaStructure, StructureError> {
    let n = lam.dim();
    let subs = substructures(lam, DER_TOL)?;
    if subs.radical.len() != n {
        return Err(StructureError::NotNilpotent { radical: subs.radical.len(), dim: n });
    }
    let lam_n = if lam.is_zero() { lam.clone() } else { lam.normalized()? };
    let l_basis = matrices(n, &kernel(&intertwiner_system(&lam_n, true), DER_TOL)?);
    let r_basis = matrices(n, &kernel(&intertwiner_system(&lam_n, false), DER_TOL)?);
    let gamma_l = commutant(&l_basis, &r_basis, n)?;
    let gamma_r = commutant(&r_basis, &l_basis, n)?;

    // unknowns (x, y): Φ = Σ x_a Γl_a, Ψ = Σ y_b Γr_b, with λ(e_i, Φe_j) = λ(Ψe_i, e_j)
    let e = |v: usize| {
        let mut x = vec![ZERO; n];
        x[v] = C64::new(1.0, 0.0);
        x
    };
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for a in &gamma_l {
        let mut col = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                col.extend(lam_n.product(&e(i), &a.column(j)));
            }
        }
        cols.push(col);
    }
    for b in &gamma_r {
        let mut col = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                col.extend(lam_n.product(&b.column(i), &e(j)).iter().map(|z| -z));
            }
        }
        cols.push(col);
    }
    let k = cols.len();
    let gamma: Vec<GammaPair> = if k == 0 {
        Vec::new()
    } else {
        let sys = CMatrix::from_columns(n * n * n, &cols);
        let raw = if sys.max_abs() <= 1e-12 {
            (0..k).map(|j| CMatrix::identity(k).column(j)).collect()
        } else {
            kernel(&sys, DER_TOL)?
        };
        let nl = gamma_l.len();
        raw.iter()
            .map(|x| GammaPair::new(combine(&gamma_l, &x[..nl], n), combine(&gamma_r, &x[nl..], n)))
            .collect()
    };

    let vs: Vec<Vec<C64>> = gamma.iter().map(GammaPair::to_vec).collect();
    let mut prods = Vec::new();
    for a in &gamma {
        for b in &gamma {
            prods.push(a.product(b).to_vec());
        }
    }
    let closure_residual = containment_residual(&vs, &prods);

    Ok(GammaStructure {
        l_basis,
        r_basis,
        gamma_l,
        gamma_r,
        gamma,
        degenerate: lam.is_zero(),
        closure_residual,
    })
}

/// Coordinates of `v` in the (independent) family `basis`, with the relative
/// residual of the fit.
fn coordinates(basis: &[Vec<C64>], v: &[C64]) -> Result<(Vec<C64>, f64), StructureError> {
    let a = CMatrix::from_columns(v.len(), basis);
    let sol = cla::lstsq_min_norm(&a, v)?;
    let nv = cla::vec_norm(v).max(f64::MIN_POSITIVE);
    Ok((sol.x, sol.residual / nv))
}

/// The semidirect sum `S ⋉ λ` on an orthonormal frame for the metric that
/// extends the one of `λ` by
/// `⟨H, K⟩ = −(2/c_λ)(tr L^S_H L^S_{K*} + tr Φ_H Φ_K* + tr Ψ_H Ψ_K*)`.
///
/// Coordinates of `λ` come first, followed by the given basis of `S`.
pub fn semidirect_sum(
    s: &[GammaPair],
    lam: &AlgebraTensor,
    critical: &CriticalReport,
) -> Result<AlgebraTensor, StructureError> {
    if s.is_empty() {
        return Ok(lam.clone());
    }
    if !critical.critical {
        return Err(StructureError::NotCritical(critical.residual));
    }
    let m = lam.dim();
    for (idx, h) in s.iter().enumerate() {
        if h.phi.rows() != m || h.psi.rows() != m {
            return Err(AlgebraError::DimensionMismatch { left: m, right: h.phi.rows() }.into());
        }
        let d = h.defect(lam);
        if d > PAIR_TOL {
            return Err(StructureError::NotInGamma(idx, d));
        }
    }
    let vs: Vec<Vec<C64>> = s.iter().map(GammaPair::to_vec).collect();
    if orthonormal_span(&vs, 1e-10).len() != s.len() {
        return Err(StructureError::Linalg(cla::LinalgError::Singular));
    }

    let d1 = s.len();
    let mut table = vec![vec![Vec::new(); d1]; d1];
    let mut closure: f64 = 0.0;
    for a in 0..d1 {
        for b in 0..d1 {
            let (x, r) = coordinates(&vs, &s[a].product(&s[b]).to_vec())?;
            closure = closure.max(r);
            table[a][b] = x;
        }
    }
    if closure > PAIR_TOL {
        return Err(StructureError::NotClosed(closure));
    }
    let mut adj = Vec::with_capacity(d1);
    let mut adj_res: f64 = 0.0;
    for h in s {
        let (x, r) = coordinates(&vs, &h.adjoint().to_vec())?;
        adj_res = adj_res.max(r);
        adj.push(x);
    }
    if adj_res > PAIR_TOL {
        return Err(StructureError::NotAdjointClosed(adj_res));
    }
    let dn = critical.d.norm_fro().max(f64::MIN_POSITIVE);
    let comm = s
        .iter()
        .map(|h| {
            let hn = (h.phi.norm_fro() + h.psi.norm_fro()).max(f64::MIN_POSITIVE);
            (critical.d.commutator(&h.phi).norm_fro() + critical.d.commutator(&h.psi).norm_fro()) / (dn * hn)
        })
        .fold(0.0, f64::max);
    if comm > PAIR_TOL {
        return Err(StructureError::NotCommuting(comm));
    }

    // raw tensor: λ on 0..m, S on m..m+d1
    let n = m + d1;
    let mut terms = Vec::new();
    for (i, j, k, c) in lam.terms() {
        terms.push((i, j, k, c));
    }
    for a in 0..d1 {
        for b in 0..d1 {
            for (c, &w) in table[a][b].iter().enumerate() {
                terms.push((m + a, m + b, m + c, w));
            }
        }
        for j in 0..m {
            for k in 0..m {
                // H_a e_j = Φ_a e_j, e_j H_a = Ψ_a e_j
                terms.push((m + a, j, k, s[a].phi[(k, j)]));
                terms.push((j, m + a, k, s[a].psi[(k, j)]));
            }
        }
    }
    let raw = AlgebraTensor::from_terms(n, &terms)?;

    // L^S_{H_a} in the S basis: column b holds the coordinates of H_a H_b
    let ls: Vec<CMatrix> = (0..d1)
        .map(|a| CMatrix::from_fn(d1, d1, |c, b| table[a][b][c]))
        .collect();
    let ls_adj: Vec<CMatrix> = adj.iter().map(|w| combine(&ls, w, d1)).collect();
    let scale = -2.0 / critical.c;
    let gram = CMatrix::from_fn(d1, d1, |a, b| {
        ((&ls[a] * &ls_adj[b]).trace() + s[a].phi.inner(&s[b].phi) + s[a].psi.inner(&s[b].psi)) * scale
    });
    // coordinates x carry the norm x* conj(G) x; move to y = g x with g*g = conj(G)
    let gconj = CMatrix::from_fn(d1, d1, |a, b| gram[(a, b)].conj());
    let root = cla::hermitian_sqrt(&gconj)?;
    let g = CMatrix::from_fn(n, n, |i, j| match (i >= m, j >= m) {
        (true, true) => root[(i - m, j - m)],
        (false, false) if i == j => C64::new(1.0, 0.0),
        _ => ZERO,
    });
    let out = raw.act_group(&g)?;
    let (ok, worst) = out.is_associative(ASSOC_TOL * (1.0 + out.norm_sq()));
    if !ok {
        return Err(StructureError::NotAssociative(worst));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::moment::{critical_test, CRITICAL_TOL};

    fn d5() -> AlgebraTensor {
        catalog::get("d5@2").unwrap().tensor
    }

    #[test]
    fn d5_pattern() {
        let g = gamma_structure(&d5()).unwrap();
        let id = GammaPair::new(CMatrix::identity(2), CMatrix::identity(2));
        assert!(g.distance(&id) < 1e-10);
        assert_eq!(g.gamma.len(), 3);
        assert!(g.closure_residual < 1e-10);
        assert!(!g.degenerate);
        let s = 0.5;
        let phi = CMatrix::from_real_diag(&[s, s * s]);
        assert!(!g.l_basis.is_empty());
        let vs: Vec<Vec<C64>> = g.l_basis.iter().map(|b| b.to_vec()).collect();
        assert!(containment_residual(&vs, &[phi.to_vec()]) > 1e-3);
        assert!(containment_residual(&vs, &[CMatrix::from_real_diag(&[1.0, 1.0]).to_vec()]) < 1e-10);
    }

    #[test]
    fn zero_algebra_is_degenerate() {
        let g = gamma_structure(&AlgebraTensor::zeros(2)).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.l_basis.len(), 4);
        assert_eq!(g.gamma_l.len(), 1);
        assert_eq!(g.gamma.len(), 2);
    }

    #[test]
    fn rejects_non_nilpotent() {
        let e = gamma_structure(&catalog::get("d1@2").unwrap().tensor).unwrap_err();
        assert!(matches!(e, StructureError::NotNilpotent { .. }));
    }

    #[test]
    fn builds_d19() {
        let lam = d5();
        let r = critical_test(&lam, CRITICAL_TOL).unwrap();
        let id = GammaPair::new(CMatrix::identity(2), CMatrix::identity(2));
        let mu = semidirect_sum(&[id], &lam, &r).unwrap();
        assert!(mu.rel_distance(&catalog::get("d19@3").unwrap().tensor) < 1e-12);
        let rep = critical_test(&mu, CRITICAL_TOL).unwrap();
        assert!(rep.residual < 1e-7);
        assert_eq!(rep.type_string(), "(0<1<2;1,1,1)");
        assert!((rep.value - 10.0 / 3.0).abs() < 1e-10);
        assert_eq!(semidirect_sum(&[], &lam, &r).unwrap(), lam);
    }

    #[test]
    fn rejects_non_normal_pair() {
        let lam = d5();
        let r = critical_test(&lam, CRITICAL_TOL).unwrap();
        let nil = CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let pair = GammaPair::new(nil, CMatrix::zeros(2, 2));
        assert!(gamma_structure(&lam).unwrap().distance(&pair) < 1e-10);
        let e = semidirect_sum(&[pair], &lam, &r).unwrap_err();
        assert!(matches!(e, StructureError::NotAdjointClosed(_)));
    }
}
