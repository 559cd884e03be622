//! Rational reconstruction of floating-point values and a little exact
//! linear algebra over `Q`.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<i64>;

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued-fraction convergents and the final semiconvergent.
pub fn best_rational(x: f64, max_den: i64) -> Rational {
    assert!(max_den >= 1);
    if !x.is_finite() {
        return Rational::zero();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (p2, q2) = (a.saturating_mul(p1).saturating_add(p0), a.saturating_mul(q1).saturating_add(q0));
        if q2 > max_den {
            // largest semiconvergent that still fits
            let k = (max_den - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let cand_semi = Rational::new(ps, qs);
            let cand_conv = Rational::new(p1, q1);
            let err = |c: &Rational| (x - *c.numer() as f64 / *c.denom() as f64).abs();
            return if k > 0 && err(&cand_semi) < err(&cand_conv) {
                cand_semi
            } else {
                cand_conv
            };
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    Rational::new(p1, q1)
}

/// `Some(p/q)` when `|x − p/q| ≤ tol` for the best approximation with
/// denominator at most `max_den`.
pub fn reconstruct(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    let r = best_rational(x, max_den);
    let approx = *r.numer() as f64 / *r.denom() as f64;
    ((x - approx).abs() <= tol).then_some(r)
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn lcm_of_denominators(rs: &[Rational]) -> i64 {
    rs.iter().fold(1i64, |acc, r| acc.lcm(r.denom()))
}

pub fn gcd_of(values: &[i64]) -> i64 {
    values.iter().fold(0i64, |acc, v| acc.gcd(v))
}

/// Exact matrix over `Q`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Indices of a maximal linearly independent subset of rows, taken greedily
    /// in order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        let mut chosen = Vec::new();
        for i in 0..self.rows {
            let mut row: Vec<Rational> = (0..self.cols).map(|j| self.get(i, j)).collect();
            for (b, &p) in basis.iter().zip(&pivots) {
                if !row[p].is_zero() {
                    let f = row[p] / b[p];
                    for (x, y) in row.iter_mut().zip(b) {
                        *x -= f * *y;
                    }
                }
            }
            if let Some(p) = row.iter().position(|x| !x.is_zero()) {
                basis.push(row);
                pivots.push(p);
                chosen.push(i);
            }
        }
        chosen
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let n = self.rows;
        if self.cols != n || b.len() != n {
            return None;
        }
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rational> = (0..n).map(|j| self.get(i, j)).collect();
                row.push(b[i]);
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            let p = a[col][col];
            for x in a[col].iter_mut() {
                *x /= p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col];
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x -= f * *y;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n]).collect())
    }
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_small_fractions() {
        assert_eq!(best_rational(0.5, 64), Rational::new(1, 2));
        assert_eq!(best_rational(5.0 / 6.0, 64), Rational::new(5, 6));
        assert_eq!(best_rational(-7.0 / 3.0, 64), Rational::new(-7, 3));
        assert_eq!(best_rational(0.0, 64), Rational::new(0, 1));
        assert_eq!(best_rational(3.0, 64), Rational::new(3, 1));
        assert_eq!(reconstruct(0.6 + 1e-9, 64, 1e-6), Some(Rational::new(3, 5)));
        assert_eq!(reconstruct(std::f64::consts::PI, 64, 1e-6), None);
    }

    #[test]
    fn respects_denominator_bound() {
        let r = best_rational(std::f64::consts::PI, 64);
        assert!(*r.denom() <= 64);
        assert_eq!(r, Rational::new(201, 64));
        let r = best_rational(1.0 / 65.0, 64);
        assert!(*r.denom() <= 64);
    }

    #[test]
    fn gcd_lcm() {
        assert_eq!(gcd_of(&[6, 12, 10]), 2);
        assert_eq!(gcd_of(&[0, 0]), 0);
        assert_eq!(
            lcm_of_denominators(&[Rational::new(1, 2), Rational::new(5, 6), Rational::new(1, 1)]),
            6
        );
    }

    #[test]
    fn exact_solve() {
        let a = QMatrix::from_rows(&[
            vec![Rational::new(2, 1), Rational::new(1, 1)],
            vec![Rational::new(1, 1), Rational::new(3, 1)],
        ]);
        let x = a.solve(&[Rational::new(1, 1), Rational::new(2, 1)]).unwrap();
        assert_eq!(x, vec![Rational::new(1, 5), Rational::new(3, 5)]);
        let rows = QMatrix::from_rows(&[
            vec![Rational::new(1, 1), Rational::new(1, 1)],
            vec![Rational::new(2, 1), Rational::new(2, 1)],
            vec![Rational::new(0, 1), Rational::new(1, 1)],
        ]);
        assert_eq!(rows.independent_rows(), vec![0, 2]);
    }
}
