//! Seeded random sampling: invertible matrices and test algebras.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{catalog, AlgebraTensor};
use crate::cla::{self, CMatrix, C64};

/// Complex Gaussian matrix, resampled until its condition number is at
/// most `max_cond`.
pub fn random_gl<R: Rng + ?Sized>(n: usize, max_cond: f64, rng: &mut R) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        });
        if let Ok((_, cond)) = cla::inverse(&g) {
            if cond <= max_cond {
                return g;
            }
        }
    }
}

/// Haar-like random unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = random_gl(n, 1e6, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let c = cla::vec_dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = cla::vec_norm(&v);
        cols.push(v.iter().map(|z| z / nv).collect());
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Random associative algebra of dimension at most `max_dim`: a random
/// conjugate of a catalog entry or of a direct sum of two small entries.
pub fn random_algebra<R: Rng + ?Sized>(max_dim: usize, rng: &mut R) -> AlgebraTensor {
    let pool: Vec<AlgebraTensor> = catalog::all()
        .into_iter()
        .map(|e| e.tensor)
        .filter(|t| t.dim() <= max_dim)
        .collect();
    let mut mu = pool[rng.random_range(0..pool.len())].clone();
    if mu.dim() < max_dim && rng.random_bool(0.5) {
        let room = max_dim - mu.dim();
        let small: Vec<&AlgebraTensor> = pool.iter().filter(|t| t.dim() <= room).collect();
        if !small.is_empty() {
            let other = small[rng.random_range(0..small.len())];
            mu = mu
                .direct_sum(other, C64::new(rng.random_range(0.5..2.0), 0.0))
                .expect("nonzero scale");
        }
    }
    let g = random_gl(mu.dim(), 100.0, rng);
    mu.act_group(&g).expect("well-conditioned sample")
}

/// Random complex tensor with standard Gaussian entries, not necessarily
/// associative.
pub fn random_tensor<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AlgebraTensor {
    let mut t = AlgebraTensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                t.set(i, j, k, C64::new(re, im));
            }
        }
    }
    t
}
