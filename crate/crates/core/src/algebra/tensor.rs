use std::fmt;

use crate::cla::{self, CMatrix, C64, ZERO};

use super::AlgebraError;

/// Default tolerance for associativity checks.
pub const ASSOC_TOL: f64 = 1e-9;

/// Condition number above which a change of basis is flagged as unreliable.
pub const COND_WARN: f64 = 1e12;

/// A point `μ ∈ V_n`: structure constants `μ(e_i, e_j) = Σ_k c_{ij}^k e_k` in
/// a fixed orthonormal frame. Indices are zero-based here; the JSON format
/// uses one-based indices.
#[derive(Clone, PartialEq)]
pub struct AlgebraTensor {
    dim: usize,
    c: Vec<C64>,
}

impl AlgebraTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            c: vec![ZERO; dim * dim * dim],
        }
    }

    /// Builds a tensor from `(i, j, k, c_ij^k)` with zero-based indices.
    /// Repeated triples are summed.
    pub fn from_terms(dim: usize, terms: &[(usize, usize, usize, C64)]) -> Result<Self, AlgebraError> {
        let mut t = Self::zeros(dim);
        for &(i, j, k, v) in terms {
            if i >= dim || j >= dim || k >= dim {
                return Err(AlgebraError::IndexOutOfRange { dim, index: (i + 1, j + 1, k + 1) });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(AlgebraError::NonFinite);
            }
            *t.get_mut(i, j, k) += v;
        }
        Ok(t)
    }

    /// Unit structure constants from one-based `(i, j, k)` triples, written the
    /// way multiplication tables are usually listed (`ψ_k^{i,j}`).
    pub fn from_unit_terms(dim: usize, terms: &[(usize, usize, usize)]) -> Self {
        let t: Vec<_> = terms
            .iter()
            .map(|&(i, j, k)| (i - 1, j - 1, k - 1, C64::new(1.0, 0.0)))
            .collect();
        Self::from_terms(dim, &t).expect("literal table out of range")
    }

    pub fn from_raw(dim: usize, c: Vec<C64>) -> Result<Self, AlgebraError> {
        if c.len() != dim * dim * dim {
            return Err(AlgebraError::DimensionMismatch { left: dim * dim * dim, right: c.len() });
        }
        if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(AlgebraError::NonFinite);
        }
        Ok(Self { dim, c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.c[self.idx(i, j, k)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize, k: usize) -> &mut C64 {
        let ix = self.idx(i, j, k);
        &mut self.c[ix]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: C64) {
        *self.get_mut(i, j, k) = v;
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.c
    }

    /// Nonzero structure constants as zero-based `(i, j, k, c)`.
    pub fn terms(&self) -> Vec<(usize, usize, usize, C64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if v != ZERO {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|z| *z == ZERO)
    }

    pub(crate) fn require_nonzero(&self) -> Result<(), AlgebraError> {
        if self.norm_sq() == 0.0 {
            Err(AlgebraError::ZeroTensor)
        } else {
            Ok(())
        }
    }

    pub fn scale(&self, t: C64) -> Self {
        Self {
            dim: self.dim,
            c: self.c.iter().map(|z| z * t).collect(),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        self.scale(C64::new(t, 0.0))
    }

    /// `μ / ‖μ‖`.
    pub fn normalized(&self) -> Result<Self, AlgebraError> {
        self.require_nonzero()?;
        Ok(self.scale_real(1.0 / self.norm()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: C64, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + t * b).collect(),
        })
    }

    fn check_dim(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dim != other.dim {
            Err(AlgebraError::DimensionMismatch { left: self.dim, right: other.dim })
        } else {
            Ok(())
        }
    }

    /// `μ(x, y)` for coordinate vectors.
    pub fn product(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for i in 0..n {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == ZERO {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.get(i, j, k);
                }
            }
        }
        out
    }

    /// Left multiplication `L_x(y) = μ(x, y)`.
    pub fn left_mult(&self, x: &[C64]) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n, n, |k, j| (0..n).map(|i| x[i] * self.get(i, j, k)).sum())
    }

    /// Right multiplication `R_x(y) = μ(y, x)`.
    pub fn right_mult(&self, x: &[C64]) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n, n, |k, j| (0..n).map(|i| x[i] * self.get(j, i, k)).sum())
    }

    /// `L_{e_i}`: column `j` holds `μ(e_i, e_j)`.
    pub fn left_basis(&self, i: usize) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n, n, |k, j| self.get(i, j, k))
    }

    /// `R_{e_i}`: column `j` holds `μ(e_j, e_i)`.
    pub fn right_basis(&self, i: usize) -> CMatrix {
        let n = self.dim;
        CMatrix::from_fn(n, n, |k, j| self.get(j, i, k))
    }

    /// Hermitian inner product `⟨μ, λ⟩ = Σ c^μ conj(c^λ)`.
    pub fn inner_product(&self, other: &Self) -> Result<C64, AlgebraError> {
        self.check_dim(other)?;
        Ok(self.c.iter().zip(&other.c).map(|(a, b)| a * b.conj()).sum())
    }

    /// Group action `g.μ(X, Y) = g μ(g⁻¹X, g⁻¹Y)`.
    pub fn act_group(&self, g: &CMatrix) -> Result<Self, AlgebraError> {
        self.act_group_with_condition(g).map(|(t, _)| t)
    }

    /// Group action together with the condition number of `g`.
    pub fn act_group_with_condition(&self, g: &CMatrix) -> Result<(Self, f64), AlgebraError> {
        let n = self.dim;
        if g.rows() != n || g.cols() != n {
            return Err(AlgebraError::DimensionMismatch { left: n, right: g.rows() });
        }
        let (h, cond) = cla::inverse(g).map_err(|_| AlgebraError::SingularMatrix)?;
        Ok((self.act_group_pair(g, &h), cond))
    }

    /// `g.μ` with a precomputed inverse `h = g⁻¹`.
    pub fn act_group_pair(&self, g: &CMatrix, h: &CMatrix) -> Self {
        let n = self.dim;
        // t1[a][b][k] = Σ_c c_ab^c g_kc
        let mut t1 = vec![ZERO; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self.get(a, b, c);
                    if v == ZERO {
                        continue;
                    }
                    for k in 0..n {
                        t1[(a * n + b) * n + k] += g[(k, c)] * v;
                    }
                }
            }
        }
        // t2[i][b][k] = Σ_a h_ai t1[a][b][k]
        let mut t2 = vec![ZERO; n * n * n];
        for a in 0..n {
            for i in 0..n {
                let w = h[(a, i)];
                if w == ZERO {
                    continue;
                }
                for bk in 0..n * n {
                    t2[i * n * n + bk] += w * t1[a * n * n + bk];
                }
            }
        }
        // out[i][j][k] = Σ_b h_bj t2[i][b][k]
        let mut out = vec![ZERO; n * n * n];
        for i in 0..n {
            for b in 0..n {
                for j in 0..n {
                    let w = h[(b, j)];
                    if w == ZERO {
                        continue;
                    }
                    for k in 0..n {
                        out[(i * n + j) * n + k] += w * t2[(i * n + b) * n + k];
                    }
                }
            }
        }
        Self { dim: n, c: out }
    }

    /// Infinitesimal action `A.μ(X, Y) = Aμ(X, Y) − μ(AX, Y) − μ(X, AY)`.
    pub fn act_lie(&self, a: &CMatrix) -> Result<Self, AlgebraError> {
        let n = self.dim;
        if a.rows() != n || a.cols() != n {
            return Err(AlgebraError::DimensionMismatch { left: n, right: a.rows() });
        }
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = ZERO;
                    for l in 0..n {
                        s += a[(k, l)] * self.get(i, j, l);
                        s -= a[(l, i)] * self.get(l, j, k);
                        s -= a[(l, j)] * self.get(i, l, k);
                    }
                    out.set(i, j, k, s);
                }
            }
        }
        Ok(out)
    }

    /// Largest associator `‖μ(e_i, μ(e_j, e_k)) − μ(μ(e_i, e_j), e_k)‖` over
    /// basis triples.
    pub fn associator_max(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s2 = 0.0;
                    for m in 0..n {
                        let mut v = ZERO;
                        for l in 0..n {
                            v += self.get(j, k, l) * self.get(i, l, m);
                            v -= self.get(i, j, l) * self.get(l, k, m);
                        }
                        s2 += v.norm_sqr();
                    }
                    worst = worst.max(s2.sqrt());
                }
            }
        }
        worst
    }

    /// Associativity test; returns the verdict and the largest violation.
    pub fn is_associative(&self, tol: f64) -> (bool, f64) {
        let v = self.associator_max();
        (v <= tol, v)
    }

    /// Block sum `μ ⊕ tλ` on `C^{n+m}`; the blocks multiply to zero across.
    pub fn direct_sum(&self, other: &Self, t: C64) -> Result<Self, AlgebraError> {
        if t == ZERO {
            return Err(AlgebraError::ZeroScale);
        }
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n + m);
        for (i, j, k, v) in self.terms() {
            out.set(i, j, k, v);
        }
        for (i, j, k, v) in other.terms() {
            out.set(n + i, n + j, n + k, v * t);
        }
        Ok(out)
    }

    /// Relative distance `‖μ − λ‖ / max(‖μ‖, ‖λ‖)`.
    pub fn rel_distance(&self, other: &Self) -> f64 {
        let d = self.sub(other).map(|x| x.norm()).unwrap_or(f64::INFINITY);
        let s = self.norm().max(other.norm());
        if s == 0.0 {
            d
        } else {
            d / s
        }
    }
}

impl fmt::Debug for AlgebraTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraTensor(dim {}", self.dim)?;
        for (i, j, k, v) in self.terms() {
            write!(f, ", e{}e{}→{:.4}{:+.4}i e{}", i + 1, j + 1, v.re, v.im, k + 1)?;
        }
        write!(f, ")")
    }
}
