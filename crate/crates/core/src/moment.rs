//! The moment matrix `M_μ`, the energy `F_n`, its gradient, the critical
//! point test `M_μ = c_μ I + D_μ` and critical types.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraTensor};
use crate::cla::{self, CMatrix, LinalgError, C64, ZERO};
use crate::rational::{self, Rational};

/// Critical threshold for exact inputs.
pub const CRITICAL_TOL: f64 = 1e-7;
/// Critical threshold for flow limits.
pub const FLOW_CRITICAL_TOL: f64 = 1e-5;
/// Eigenvalue clustering tolerance after scaling `D` to unit spectral radius.
pub const CLUSTER_TOL: f64 = 1e-6;
pub const MAX_DEN: i64 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("eigenvalue {value} has no rational approximation with denominator ≤ {max_den}")]
    Reconstruction { value: f64, max_den: i64 },
    #[error("invalid type: {0}")]
    InvalidType(String),
}

#[derive(Clone, Debug)]
pub struct MomentMatrix {
    pub m: CMatrix,
    pub norm_sq: f64,
}

impl MomentMatrix {
    /// `tr M²`, real because `M` is Hermitian.
    pub fn trace_sq(&self) -> f64 {
        let n = self.m.norm_fro();
        n * n
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }
}

/// `M_μ = 2Σ L_i L_i* − 2Σ L_i* L_i − 2Σ R_i* R_i`, entrywise
/// `M_ab = 2Σ c_ij^a conj(c_ij^b) − 2Σ conj(c_ia^k) c_ib^k − 2Σ conj(c_ai^k) c_bi^k`.
pub fn moment_matrix(mu: &AlgebraTensor) -> Result<MomentMatrix, MomentError> {
    mu.require_nonzero()?;
    let n = mu.dim();
    let mut m = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut s = ZERO;
            for i in 0..n {
                for j in 0..n {
                    s += mu.get(i, j, a) * mu.get(i, j, b).conj();
                    // j plays the role of k in the two negative sums
                    s -= mu.get(i, a, j).conj() * mu.get(i, b, j);
                    s -= mu.get(a, i, j).conj() * mu.get(b, i, j);
                }
            }
            s *= 2.0;
            if a == b {
                m[(a, a)] = C64::new(s.re, 0.0);
            } else {
                m[(a, b)] = s;
                m[(b, a)] = s.conj();
            }
        }
    }
    Ok(MomentMatrix { m, norm_sq: mu.norm_sq() })
}

/// `F_n([μ]) = tr M_μ² / ‖μ‖⁴`.
pub fn f_value(mu: &AlgebraTensor) -> Result<f64, MomentError> {
    let mm = moment_matrix(mu)?;
    Ok(mm.trace_sq() / (mm.norm_sq * mm.norm_sq))
}

/// Gradient of `F_n` for the real inner product `Re⟨·,·⟩` on `V_n`:
/// `−4F/‖μ‖² μ + 8 (M_μ).μ / ‖μ‖⁴`.
pub fn euclidean_gradient(mu: &AlgebraTensor) -> Result<AlgebraTensor, MomentError> {
    let mm = moment_matrix(mu)?;
    let ns = mm.norm_sq;
    let f = mm.trace_sq() / (ns * ns);
    let lie = mu.act_lie(&mm.m)?;
    Ok(mu.scale_real(-4.0 * f / ns).axpy(C64::new(8.0 / (ns * ns), 0.0), &lie)?)
}

/// Ascending integers `k_1 < … < k_r` with multiplicities `d_1, …, d_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CriticalType {
    pub ks: Vec<i64>,
    pub ds: Vec<usize>,
}

impl CriticalType {
    pub fn new(ks: Vec<i64>, ds: Vec<usize>) -> Self {
        Self { ks, ds }
    }

    pub fn zero(n: usize) -> Self {
        Self { ks: vec![0], ds: vec![n] }
    }

    pub fn dim(&self) -> usize {
        self.ds.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ks == [0]
    }

    /// Critical value for this type in dimension `n`.
    pub fn value(&self, n: usize) -> Result<f64, MomentError> {
        value_from_type(self, n)
    }
}

impl fmt::Display for CriticalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<String> = self.ks.iter().map(|k| k.to_string()).collect();
        let ds: Vec<String> = self.ds.iter().map(|d| d.to_string()).collect();
        write!(f, "({};{})", ks.join("<"), ds.join(","))
    }
}

/// `4 / (n − (Σ k_i d_i)² / Σ k_i² d_i)`, and `4/n` for the type `(0;n)`.
pub fn value_from_type(ty: &CriticalType, n: usize) -> Result<f64, MomentError> {
    if ty.ks.len() != ty.ds.len() || ty.ks.is_empty() {
        return Err(MomentError::InvalidType(ty.to_string()));
    }
    if ty.dim() != n || ty.ds.contains(&0) {
        return Err(MomentError::InvalidType(format!("{ty} does not partition {n}")));
    }
    if ty.is_zero() {
        return Ok(4.0 / n as f64);
    }
    let s1: f64 = ty.ks.iter().zip(&ty.ds).map(|(&k, &d)| k as f64 * d as f64).sum();
    let s2: f64 = ty.ks.iter().zip(&ty.ds).map(|(&k, &d)| (k * k) as f64 * d as f64).sum();
    let denom = n as f64 - s1 * s1 / s2;
    if denom <= 0.0 {
        return Err(MomentError::InvalidType(ty.to_string()));
    }
    Ok(4.0 / denom)
}

/// Groups sorted values into runs whose consecutive gaps are at most `tol`.
pub(crate) fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some((sum, cnt, last)) if (x - *last).abs() <= tol => {
                *sum += x;
                *cnt += 1;
                *last = x;
            }
            _ => out.push((x, 1, x)),
        }
    }
    out.into_iter().map(|(s, c, _)| (s / c as f64, c)).collect()
}

/// Integer pattern of a list of (value, multiplicity) clusters already scaled
/// to order one: rational reconstruction, common denominator, gcd reduction.
pub(crate) fn integer_pattern(
    clusters: &[(f64, usize)],
    tol: f64,
    max_den: i64,
) -> Result<Vec<(i64, usize, Rational)>, MomentError> {
    let mut rs = Vec::with_capacity(clusters.len());
    for &(v, _) in clusters {
        let r = rational::reconstruct(v, max_den, tol).ok_or(MomentError::Reconstruction { value: v, max_den })?;
        rs.push(r);
    }
    let l = rational::lcm_of_denominators(&rs);
    let ints: Vec<i64> = rs.iter().map(|r| (*r * l).to_integer()).collect();
    let g = rational::gcd_of(&ints).max(1);
    let mut out: Vec<(i64, usize, Rational)> = Vec::new();
    for ((k, &(_, d)), r) in ints.iter().zip(clusters).zip(&rs) {
        let k = k / g;
        match out.iter_mut().find(|(kk, _, _)| *kk == k) {
            Some(e) => e.1 += d,
            None => out.push((k, d, *r)),
        }
    }
    out.sort_by_key(|e| e.0);
    Ok(out)
}

/// Type of a Hermitian `D`: eigenvalues scaled to unit spectral radius,
/// clustered within `cluster_tol`, reconstructed as rationals with denominator
/// at most `max_den`, then cleared and divided by their gcd.
pub fn critical_type(d: &CMatrix, cluster_tol: f64, max_den: i64) -> Result<CriticalType, MomentError> {
    let eig = cla::hermitian_eig(d)?;
    type_from_eigenvalues(&eig.eigenvalues, cluster_tol, max_den)
}

pub(crate) fn type_from_eigenvalues(ev: &[f64], cluster_tol: f64, max_den: i64) -> Result<CriticalType, MomentError> {
    let n = ev.len();
    let r = ev.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if r == 0.0 {
        return Ok(CriticalType::zero(n));
    }
    let mut xs: Vec<f64> = ev.iter().map(|x| x / r).collect();
    xs.sort_by(f64::total_cmp);
    let pattern = integer_pattern(&cluster(&xs, cluster_tol), cluster_tol, max_den)?;
    Ok(CriticalType {
        ks: pattern.iter().map(|e| e.0).collect(),
        ds: pattern.iter().map(|e| e.1).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalReport {
    pub c: f64,
    #[serde(skip)]
    pub d: CMatrix,
    pub residual: f64,
    pub critical: bool,
    #[serde(rename = "type")]
    pub critical_type: Option<CriticalType>,
    pub value: f64,
    #[serde(rename = "D_eigenvalues")]
    pub d_eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type_error: Option<String>,
}

impl CriticalReport {
    pub fn type_string(&self) -> String {
        self.critical_type
            .as_ref()
            .map_or_else(|| "-".to_string(), |t| t.to_string())
    }
}

/// `c_μ = tr M²/tr M` and `D_μ = M_μ − c_μ I` for the tensor as given.
pub fn decompose(mu: &AlgebraTensor) -> Result<(MomentMatrix, f64, CMatrix), MomentError> {
    let mm = moment_matrix(mu)?;
    let c = mm.trace_sq() / mm.trace();
    let n = mu.dim();
    let d = &mm.m - &CMatrix::identity(n).scale_real(c);
    Ok((mm, c, d))
}

/// Critical point test. `c` and `D` refer to `μ` as given; the residual
/// `‖D.μ‖/‖μ‖` is computed after scaling `μ` to unit norm.
pub fn critical_test(mu: &AlgebraTensor, tol: f64) -> Result<CriticalReport, MomentError> {
    let (mm, c, d) = decompose(mu)?;
    let ns = mm.norm_sq;
    let residual = mu.act_lie(&d)?.norm() / (ns * ns.sqrt());
    let eig = cla::hermitian_eig(&d)?;
    let value = mm.trace_sq() / (ns * ns);
    let critical = residual <= tol;
    let mut report = CriticalReport {
        c,
        d,
        residual,
        critical,
        critical_type: None,
        value,
        d_eigenvalues: eig.eigenvalues.clone(),
        type_error: None,
    };
    if critical {
        let radius = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if radius <= CLUSTER_TOL * c.abs() {
            report.critical_type = Some(CriticalType::zero(mu.dim()));
        } else {
            match type_from_eigenvalues(&eig.eigenvalues, CLUSTER_TOL, MAX_DEN) {
                Ok(t) => report.critical_type = Some(t),
                Err(e) => report.type_error = Some(e.to_string()),
            }
        }
    }
    Ok(report)
}
