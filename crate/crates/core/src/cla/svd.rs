use super::matrix::{vec_dot, vec_norm, CMatrix, C64, ONE, ZERO};
use super::LinalgError;

/// Default relative rank tolerance.
pub const RANK_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U Σ V*`.
///
/// Singular values are sorted in descending order. `U` is `rows × k` and
/// `V` is `cols × k` with `k = min(rows, cols)`; columns of `U` belonging to
/// zero singular values are left as zero vectors.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Threshold below which a singular value counts as zero:
    /// `tol · max(rows, cols) · σ_max`.
    pub fn cutoff(&self, tol: f64) -> f64 {
        let dim = self.u.rows().max(self.v.rows()) as f64;
        tol * dim * self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, tol: f64) -> usize {
        let cut = self.cutoff(tol);
        self.sigma.iter().filter(|&&s| s > cut).count()
    }
}

/// Householder QR; returns `R` (`cols × cols`, upper triangular) together with
/// the reflectors so `Q* b` can be formed later.
struct Qr {
    reflectors: Vec<(usize, Vec<C64>, C64)>,
    r: CMatrix,
}

impl Qr {
    fn new(a: &CMatrix) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut w = a.clone();
        let mut reflectors = Vec::new();
        for k in 0..n.min(m) {
            let x: Vec<C64> = (k..m).map(|i| w[(i, k)]).collect();
            let alpha = vec_norm(&x);
            if alpha == 0.0 {
                continue;
            }
            let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
            let mut v = x.clone();
            v[0] += phase * alpha;
            let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let beta = C64::new(2.0 / vnorm2, 0.0);
            for j in k..n {
                let s: C64 = (k..m).map(|i| v[i - k].conj() * w[(i, j)]).sum();
                let s = s * beta;
                for i in k..m {
                    w[(i, j)] -= v[i - k] * s;
                }
            }
            reflectors.push((k, v, beta));
        }
        let r = CMatrix::from_fn(n, n, |i, j| if i <= j && i < m { w[(i, j)] } else { ZERO });
        Self { reflectors, r }
    }

    /// First `cols` entries of `Q* b`.
    fn qt_apply(&self, b: &[C64], n: usize) -> Vec<C64> {
        let mut y = b.to_vec();
        let m = y.len();
        for (k, v, beta) in &self.reflectors {
            let s: C64 = (*k..m).map(|i| v[i - k].conj() * y[i]).sum();
            let s = s * beta;
            for i in *k..m {
                y[i] -= v[i - k] * s;
            }
        }
        y.truncate(n);
        y.resize(n, ZERO);
        y
    }
}

/// Singular value decomposition by Householder QR followed by one-sided
/// (Hestenes) Jacobi on the triangular factor.
pub fn svd(a: &CMatrix) -> Result<Svd, LinalgError> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(LinalgError::Empty);
    }
    if a.rows() < a.cols() {
        // A* = V Σ U*
        let t = svd(&a.adjoint())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let n = a.cols();
    let qr = Qr::new(a);
    let (ur, sigma, v) = jacobi_columns(qr.r.clone());
    // U = Q [U_r; 0]
    let mut u = CMatrix::zeros(a.rows(), n);
    for k in 0..n {
        let mut col = ur.column(k);
        col.resize(a.rows(), ZERO);
        for (kk, vv, beta) in qr.reflectors.iter().rev() {
            let s: C64 = (*kk..col.len()).map(|i| vv[i - kk].conj() * col[i]).sum();
            let s = s * beta;
            for i in *kk..col.len() {
                col[i] -= vv[i - kk] * s;
            }
        }
        u.set_column(k, &col);
    }
    Ok(Svd { u, sigma, v })
}

/// One-sided Jacobi on a square matrix; returns `(U, σ, V)` sorted descending.
fn jacobi_columns(mut w: CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let n = w.cols();
    let m = w.rows();
    let mut v = CMatrix::identity(n);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| w.column(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n).map(|j| v.column(j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = vec_dot(&cols[j], &cols[i]); // a_i* a_j
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let ai = cols[i][k];
                    let bj = cols[j][k] * phase_conj;
                    cols[i][k] = ai * c - bj * s;
                    cols[j][k] = ai * s + bj * c;
                }
                for k in 0..n {
                    let vi = vcols[i][k];
                    let vj = vcols[j][k] * phase_conj;
                    vcols[i][k] = vi * c - vj * s;
                    vcols[j][k] = vi * s + vj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| vec_norm(c)).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    for (slot, &k) in order.iter().enumerate() {
        let s = norms[k];
        let ucol: Vec<C64> = if s > 0.0 {
            cols[k].iter().map(|z| z / s).collect()
        } else {
            vec![ZERO; m]
        };
        w.set_column(slot, &ucol);
        v.set_column(slot, &vcols[k]);
    }
    (w, sigma, v)
}

/// Orthonormal basis of `{v : ‖A v‖ ≤ tol·‖A‖·‖v‖}` (singular values below
/// `tol · max(rows, cols) · σ_max` count as zero).
///
/// The basis is canonical for the subspace: columns of the orthogonal
/// projector are chosen by pivoting, ordered by pivot index, then
/// orthonormalized in that order.
pub fn nullspace(a: &CMatrix, tol: f64) -> Result<Vec<Vec<C64>>, LinalgError> {
    nullspace_floor(a, tol, 0.0)
}

/// [`nullspace`] with an absolute floor: singular values at or below
/// `floor` also count as zero, so a matrix of pure roundoff has full kernel.
pub fn nullspace_floor(a: &CMatrix, tol: f64, floor: f64) -> Result<Vec<Vec<C64>>, LinalgError> {
    if tol <= 0.0 {
        return Err(LinalgError::BadTolerance(tol));
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Err(LinalgError::Empty);
    }
    let n = a.cols();
    let raw: Vec<Vec<C64>> = if a.max_abs() <= floor {
        (0..n).map(|j| CMatrix::identity(n).column(j)).collect()
    } else {
        let s = svd(a)?;
        let cut = s.cutoff(tol).max(floor);
        let mut basis: Vec<Vec<C64>> = (0..s.sigma.len())
            .filter(|&k| s.sigma[k] <= cut)
            .map(|k| s.v.column(k))
            .collect();
        // a wide matrix has at least cols − rows extra kernel directions
        if s.v.cols() < n {
            basis.extend(complete_kernel(&s.v, n));
        }
        basis
    };
    Ok(canonical_basis(&raw, n))
}

/// Orthonormal complement of the columns of `v` in `C^n`.
fn complete_kernel(v: &CMatrix, n: usize) -> Vec<Vec<C64>> {
    let mut have: Vec<Vec<C64>> = (0..v.cols()).map(|j| v.column(j)).collect();
    let mut out = Vec::new();
    for e in 0..n {
        let mut x = vec![ZERO; n];
        x[e] = ONE;
        for h in &have {
            let c = vec_dot(&x, h);
            for (xi, hi) in x.iter_mut().zip(h) {
                *xi -= c * hi;
            }
        }
        let nx = vec_norm(&x);
        if nx > 1e-8 {
            let x: Vec<C64> = x.iter().map(|z| z / nx).collect();
            have.push(x.clone());
            out.push(x);
        }
        if have.len() == n {
            break;
        }
    }
    out
}

/// Deterministic orthonormal basis of `span(raw)`, independent of which
/// orthonormal basis was supplied.
pub fn canonical_basis(raw: &[Vec<C64>], n: usize) -> Vec<Vec<C64>> {
    let k = raw.len();
    if k == 0 {
        return Vec::new();
    }
    // projector columns P e_j = Σ_b b conj(b_j)
    let proj_col = |j: usize| -> Vec<C64> {
        let mut c = vec![ZERO; n];
        for b in raw {
            let w = b[j].conj();
            for (ci, bi) in c.iter_mut().zip(b) {
                *ci += bi * w;
            }
        }
        c
    };
    let mut residuals: Vec<Vec<C64>> = (0..n).map(proj_col).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let (best, _) = residuals
            .iter()
            .enumerate()
            .filter(|(j, _)| !chosen.contains(j))
            .map(|(j, r)| (j, vec_norm(r)))
            .fold((usize::MAX, -1.0), |acc, (j, nr)| {
                if nr > acc.1 * (1.0 + 1e-12) {
                    (j, nr)
                } else {
                    acc
                }
            });
        if best == usize::MAX {
            break;
        }
        let nr = vec_norm(&residuals[best]);
        let q: Vec<C64> = residuals[best].iter().map(|z| z / nr).collect();
        for r in residuals.iter_mut() {
            let c = vec_dot(r, &q);
            for (ri, qi) in r.iter_mut().zip(&q) {
                *ri -= c * qi;
            }
        }
        chosen.push(best);
    }
    chosen.sort_unstable();
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(k);
    for j in chosen {
        let mut x = proj_col(j);
        for _ in 0..2 {
            for q in &out {
                let c = vec_dot(&x, q);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= c * qi;
                }
            }
        }
        let nx = vec_norm(&x);
        // fix the phase so the pivot entry is real positive
        let p = x[j];
        let ph = if p.norm() > 0.0 { p.conj() / p.norm() } else { ONE };
        out.push(x.iter().map(|z| z * ph / nx).collect());
    }
    out
}

/// Minimal-norm least-squares solution of `A x ≈ b`.
#[derive(Clone, Debug)]
pub struct LstsqSolution {
    pub x: Vec<C64>,
    pub residual: f64,
    pub rank: usize,
}

pub fn lstsq_min_norm(a: &CMatrix, b: &[C64]) -> Result<LstsqSolution, LinalgError> {
    lstsq_min_norm_tol(a, b, RANK_TOL)
}

pub fn lstsq_min_norm_tol(a: &CMatrix, b: &[C64], tol: f64) -> Result<LstsqSolution, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::Shape {
            expected: a.rows(),
            found: b.len(),
        });
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(LstsqSolution {
            x: vec![ZERO; a.cols()],
            residual: vec_norm(b),
            rank: 0,
        });
    }
    let n = a.cols();
    let mut x = vec![ZERO; n];
    let mut rank = 0;
    if a.max_abs() > 0.0 {
        if a.rows() >= a.cols() {
            let qr = Qr::new(a);
            let y = qr.qt_apply(b, n);
            let (ur, sigma, v) = jacobi_columns(qr.r.clone());
            let dim = a.rows().max(a.cols()) as f64;
            let cut = tol * dim * sigma[0];
            for k in 0..n {
                if sigma[k] <= cut {
                    continue;
                }
                rank += 1;
                let coef = vec_dot(&y, &ur.column(k)) / sigma[k];
                for i in 0..n {
                    x[i] += v[(i, k)] * coef;
                }
            }
        } else {
            let s = svd(a)?;
            let cut = s.cutoff(tol);
            for k in 0..s.sigma.len() {
                if s.sigma[k] <= cut {
                    continue;
                }
                rank += 1;
                let coef = vec_dot(b, &s.u.column(k)) / s.sigma[k];
                for i in 0..n {
                    x[i] += s.v[(i, k)] * coef;
                }
            }
        }
    }
    let ax = a.mul_vec(&x);
    let residual = vec_norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    Ok(LstsqSolution { x, residual, rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn svd_reconstructs() {
        let a = CMatrix::from_fn(5, 3, |i, j| C64::new((i + 2 * j) as f64 - 3.0, (i * j) as f64 * 0.3));
        let s = svd(&a).unwrap();
        let sig = CMatrix::from_real_diag(&s.sigma);
        let back = &(&s.u * &sig) * &s.v.adjoint();
        assert!((&back - &a).norm_fro() < 1e-12 * a.norm_fro());
        let wide = a.adjoint();
        let s = svd(&wide).unwrap();
        let sig = CMatrix::from_real_diag(&s.sigma);
        let back = &(&s.u * &sig) * &s.v.adjoint();
        assert!((&back - &wide).norm_fro() < 1e-12 * a.norm_fro());
    }

    #[test]
    fn nullspace_trivial_cases() {
        assert_eq!(nullspace(&CMatrix::zeros(2, 2), RANK_TOL).unwrap().len(), 2);
        assert!(nullspace(&CMatrix::identity(4), RANK_TOL).unwrap().is_empty());
        assert!(matches!(
            nullspace(&CMatrix::zeros(0, 2), RANK_TOL),
            Err(LinalgError::Empty)
        ));
        assert!(matches!(
            nullspace(&CMatrix::identity(2), 0.0),
            Err(LinalgError::BadTolerance(_))
        ));
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let a = CMatrix::from_real_rows(&[&[1.0, 1.0, 0.0]]);
        let k = nullspace(&a, RANK_TOL).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(vec_norm(&a.mul_vec(v)) < 1e-14);
        }
    }

    #[test]
    fn canonical_basis_is_basis_independent() {
        let a = CMatrix::from_real_rows(&[&[1.0, -1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 1.0]]);
        let k1 = nullspace(&a, RANK_TOL).unwrap();
        let s = 0.5f64.sqrt();
        let rotated = vec![
            k1[0].iter().zip(&k1[1]).map(|(x, y)| (x + y) * s).collect::<Vec<_>>(),
            k1[0].iter().zip(&k1[1]).map(|(x, y)| (x - y) * s).collect::<Vec<_>>(),
        ];
        let k2 = canonical_basis(&rotated, 4);
        for (u, v) in k1.iter().zip(&k2) {
            for (x, y) in u.iter().zip(v) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lstsq_examples() {
        let b = vec![c(1.0), C64::new(-2.0, 0.5), c(3.0)];
        let s = lstsq_min_norm(&CMatrix::identity(3), &b).unwrap();
        assert!(s.residual < 1e-15);
        for (x, y) in s.x.iter().zip(&b) {
            assert!((x - y).norm() < 1e-15);
        }
        let s = lstsq_min_norm(&CMatrix::zeros(2, 2), &[c(0.0), c(0.0)]).unwrap();
        assert!(s.x.iter().all(|z| *z == ZERO));
        // minimal norm among x1 + x2 = 2
        let s = lstsq_min_norm(&CMatrix::from_real_rows(&[&[1.0, 1.0]]), &[c(2.0)]).unwrap();
        assert!((s.x[0] - c(1.0)).norm() < 1e-14 && (s.x[1] - c(1.0)).norm() < 1e-14);
    }
}
