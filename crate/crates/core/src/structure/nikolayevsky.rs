use serde::Serialize;

use crate::algebra::AlgebraTensor;
use crate::cla::{self, CMatrix, C64};
use crate::moment::{self, MAX_DEN};
use crate::rational::{self, QMatrix, Rational};

use super::{derivation_algebra, kernel, StructureError, DER_TOL};

const EIG_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct NikolayevskyResult {
    pub phi: CMatrix,
    /// Eigenvalues with multiplicity, ascending.
    pub eigenvalues: Vec<f64>,
    /// The same eigenvalues as `[numerator, denominator]`.
    pub eigen_rationals: Vec<[i64; 2]>,
    pub is_semisimple: bool,
    /// `max_j |tr(φ B_j) − tr B_j|` over an orthonormal basis of `Der(μ)`.
    pub trace_residual: f64,
    /// Agreement with the exact solution of the integer relation system, when
    /// that system could be set up.
    pub exact_match: Option<bool>,
}

/// Nikolayevsky derivation: minimal-norm solution of
/// `tr(φ B_j) = tr(B_j)` over a basis of `Der(μ)`, its semisimple part, and
/// the rational spectrum.
pub fn nikolayevsky(mu: &AlgebraTensor) -> Result<NikolayevskyResult, StructureError> {
    let n = mu.dim();
    let der = derivation_algebra(&mu.normalized()?, DER_TOL)?;
    let b = &der.basis;
    let k = b.len();
    let gram = CMatrix::from_fn(k, k, |i, j| (&b[i] * &b[j]).trace());
    let rhs: Vec<C64> = b.iter().map(|x| x.trace()).collect();
    let sol = cla::lstsq_min_norm(&gram, &rhs)?;
    if sol.residual > 1e-7 * (1.0 + cla::vec_norm(&rhs)) {
        return Err(StructureError::Inconsistent(sol.residual));
    }
    let phi = super::combine(b, &sol.x, n);

    let clusters = eigen_clusters(&phi)?;
    let phi_s = semisimple_part(&phi, &clusters)?;
    let scale = 1.0 + phi.norm_fro();
    let is_semisimple = (&phi - &phi_s).norm_fro() <= 1e-8 * scale;
    let phi = if is_semisimple { phi } else { phi_s };

    let trace_residual = b
        .iter()
        .map(|x| ((&phi * x).trace() - x.trace()).norm())
        .fold(0.0, f64::max);

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigen_rationals = Vec::with_capacity(n);
    let mut cluster_rats = Vec::with_capacity(clusters.len());
    for &(v, d) in &clusters {
        let r = rational::reconstruct(v, MAX_DEN, EIG_TOL)
            .ok_or_else(|| StructureError::Spectrum(format!("eigenvalue {v} is not rational with denominator ≤ {MAX_DEN}")))?;
        cluster_rats.push(r);
        for _ in 0..d {
            eigenvalues.push(v);
            eigen_rationals.push([*r.numer(), *r.denom()]);
        }
    }
    let exact_match = exact_spectrum(&clusters).map(|exact| exact == cluster_rats);

    Ok(NikolayevskyResult {
        phi,
        eigenvalues,
        eigen_rationals,
        is_semisimple,
        trace_residual,
        exact_match,
    })
}

/// Real eigenvalue clusters `(mean, multiplicity)` of `phi`.
fn eigen_clusters(phi: &CMatrix) -> Result<Vec<(f64, usize)>, StructureError> {
    let ev = cla::general_eigenvalues(phi)?;
    if let Some(z) = ev.iter().find(|z| z.im.abs() > EIG_TOL) {
        return Err(StructureError::Spectrum(format!("non-real eigenvalue {z}")));
    }
    let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    Ok(moment::cluster(&re, EIG_TOL))
}

/// Semisimple part from the generalized eigenspaces `ker (φ − λ)^m`.
fn semisimple_part(phi: &CMatrix, clusters: &[(f64, usize)]) -> Result<CMatrix, StructureError> {
    let n = phi.rows();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut diag: Vec<f64> = Vec::with_capacity(n);
    for &(lam, m) in clusters {
        let shifted = phi - &CMatrix::identity(n).scale_real(lam);
        let mut p = shifted.clone();
        for _ in 1..m {
            p = &p * &shifted;
        }
        let basis = if p.max_abs() <= 1e-10 * (1.0 + phi.max_abs()) {
            (0..n).map(|j| CMatrix::identity(n).column(j)).collect()
        } else {
            kernel(&p, 1e-7)?
        };
        if basis.len() != m {
            return Err(StructureError::Spectrum(format!(
                "generalized eigenspace for {lam} has dimension {} instead of {m}",
                basis.len()
            )));
        }
        for v in basis {
            cols.push(v);
            diag.push(lam);
        }
    }
    let p = CMatrix::from_columns(n, &cols);
    let (pinv, _) = cla::inverse(&p)?;
    Ok(&(&p * &CMatrix::from_real_diag(&diag)) * &pinv)
}

/// Exact spectrum from the relations `c_i + c_j = c_k` among the clusters:
/// `c = 1 − D⁻¹Eᵀ(ED⁻¹Eᵀ)⁻¹·1` with `D = diag(multiplicities)`.
fn exact_spectrum(clusters: &[(f64, usize)]) -> Option<Vec<Rational>> {
    let r = clusters.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for i in 0..r {
        for j in i..r {
            for k in 0..r {
                if (clusters[i].0 + clusters[j].0 - clusters[k].0).abs() <= EIG_TOL {
                    let mut row = vec![Rational::from_integer(0); r];
                    row[i] += 1;
                    row[j] += 1;
                    row[k] -= 1;
                    rows.push(row);
                }
            }
        }
    }
    let ones_r = vec![rational::one(); r];
    if rows.is_empty() {
        return Some(ones_r);
    }
    let all = QMatrix::from_rows(&rows);
    let keep = all.independent_rows();
    let e = QMatrix::from_rows(&keep.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>());
    let s = e.rows;
    let mut dinv_et = e.transpose();
    for i in 0..r {
        let w = Rational::new(1, clusters[i].1 as i64);
        for p in 0..s {
            let v = dinv_et.get(i, p) * w;
            dinv_et.set(i, p, v);
        }
    }
    let gram = e.mul(&dinv_et);
    let y = gram.solve(&vec![rational::one(); s])?;
    Some(
        (0..r)
            .map(|i| rational::one() - (0..s).map(|p| dinv_et.get(i, p) * y[p]).sum::<Rational>())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;

    fn rats(res: &NikolayevskyResult) -> Vec<(i64, i64)> {
        res.eigen_rationals.iter().map(|r| (r[0], r[1])).collect()
    }

    #[test]
    fn small_examples() {
        let r = nikolayevsky(&catalog::get("d1@2").unwrap().tensor).unwrap();
        assert_eq!(rats(&r), vec![(0, 1), (1, 1)]);
        assert!(r.trace_residual < 1e-10);
        assert_eq!(r.exact_match, Some(true));

        let r = nikolayevsky(&catalog::get("d5@2").unwrap().tensor).unwrap();
        assert_eq!(rats(&r), vec![(3, 5), (6, 5)]);
        assert!(r.is_semisimple);

        let r = nikolayevsky(&catalog::mat(2)).unwrap();
        assert!(r.phi.max_abs() < 1e-10);
        assert_eq!(rats(&r), vec![(0, 1); 4]);
    }

    #[test]
    fn exact_relations() {
        // d5 spectrum 3/5, 6/5 with relation c1 + c1 = c2
        let c = exact_spectrum(&[(0.6, 1), (1.2, 1)]).unwrap();
        assert_eq!(c, vec![Rational::new(3, 5), Rational::new(6, 5)]);
        assert_eq!(exact_spectrum(&[(0.0, 4)]).unwrap(), vec![Rational::from_integer(0)]);
    }
}
