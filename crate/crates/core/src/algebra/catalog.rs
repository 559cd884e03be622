//! Named algebras: the two- and three-dimensional classification tables,
//! the degeneration-level-one algebras `μ_l`, `μ_r`, `μ_ca`, the matrix
//! algebras `M_m(C)` and the alternative models used for three table rows.
//!
//! Structure constants are exact small integers in the standard frame.
//! Names are `d{k}@{n}` for table rows (e.g. `d15@3`), `mu_l(n)`, `mu_r(n)`,
//! `mu_ca(n)`, `mat(m)`, and `U13`, `W103`, `U03`.

use serde::Serialize;

use crate::cla::C64;
use crate::moment::CriticalType;

use super::{AlgebraError, AlgebraTensor};

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(skip)]
    pub tensor: AlgebraTensor,
    pub expected_type: Option<CriticalType>,
    pub expected_value: Option<f64>,
}

impl CatalogEntry {
    fn new(name: impl Into<String>, tensor: AlgebraTensor, ty: Option<CriticalType>) -> Self {
        let value = ty.as_ref().map(|t| t.value(tensor.dim()).expect("catalog types are valid"));
        Self {
            name: name.into(),
            tensor,
            expected_type: ty,
            expected_value: value,
        }
    }
}

fn ty(ks: &[i64], ds: &[usize]) -> Option<CriticalType> {
    Some(CriticalType::new(ks.to_vec(), ds.to_vec()))
}

type Row = (&'static [(usize, usize, usize)], &'static [i64], &'static [usize]);

/// Two-dimensional table: (ψ_k^{i,j} triples as (i, j, k), type ks, type ds).
const TABLE_I: [Row; 6] = [
    (&[(1, 1, 1)], &[0, 1], &[1, 1]),
    (&[(1, 1, 1), (1, 2, 2)], &[0, 1], &[1, 1]),
    (&[(1, 1, 1), (2, 1, 2)], &[0, 1], &[1, 1]),
    (&[(1, 1, 1), (2, 2, 2)], &[0], &[2]),
    (&[(1, 1, 2)], &[1, 2], &[1, 1]),
    (&[(1, 1, 1), (1, 2, 2), (2, 1, 2)], &[0, 1], &[1, 1]),
];

/// Three-dimensional table, rows d1..d20 (d21 and the d22 family are built
/// separately).
const TABLE_II: [Row; 20] = [
    (&[(1, 1, 1)], &[0, 1], &[1, 2]),
    (&[(1, 1, 1), (2, 2, 3)], &[0, 1, 2], &[1, 1, 1]),
    (&[(1, 1, 1), (1, 3, 3)], &[0, 1], &[1, 2]),
    (&[(1, 1, 1), (3, 1, 3)], &[0, 1], &[1, 2]),
    (&[(1, 1, 1), (1, 3, 3), (3, 1, 3)], &[0, 1], &[1, 2]),
    (&[(1, 1, 1), (3, 3, 3)], &[0, 1], &[2, 1]),
    (&[(1, 1, 1), (2, 1, 2), (1, 3, 3)], &[0, 1], &[1, 2]),
    (&[(1, 1, 1), (2, 1, 2), (3, 1, 3)], &[0, 1], &[1, 2]),
    (&[(1, 1, 1), (2, 1, 2), (1, 3, 3), (3, 1, 3)], &[0, 1], &[1, 2]),
    (&[(1, 1, 1), (2, 1, 2), (3, 3, 3)], &[0, 1], &[2, 1]),
    (&[(1, 1, 1), (2, 2, 2), (2, 3, 3)], &[0, 1], &[2, 1]),
    (&[(1, 1, 1), (2, 2, 2), (2, 3, 3), (3, 2, 3)], &[0, 1], &[2, 1]),
    (&[(1, 1, 1), (2, 2, 2), (2, 3, 3), (3, 1, 3)], &[0, 1], &[2, 1]),
    (&[(1, 1, 1), (2, 2, 2), (3, 3, 3)], &[0], &[3]),
    (&[(1, 1, 2)], &[3, 5, 6], &[1, 1, 1]),
    (&[(1, 1, 2), (1, 2, 3), (2, 1, 3)], &[1, 2, 3], &[1, 1, 1]),
    (&[(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 1, 2), (1, 3, 3)], &[0, 1], &[1, 2]),
    (
        &[(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 1, 2), (1, 3, 3), (3, 1, 3)],
        &[0, 1],
        &[1, 2],
    ),
    (
        &[(3, 3, 3), (1, 1, 2), (1, 3, 1), (3, 1, 1), (2, 3, 2), (3, 2, 2)],
        &[0, 1, 2],
        &[1, 1, 1],
    ),
    (&[(1, 1, 1), (1, 2, 2), (1, 3, 3)], &[0, 1], &[1, 2]),
];

/// Row `k` (one-based) of the table for dimension `n ∈ {2, 3}`.
pub fn table_entry(n: usize, k: usize) -> Result<CatalogEntry, AlgebraError> {
    let name = format!("d{k}@{n}");
    match (n, k) {
        (2, 1..=6) => {
            let (terms, ks, ds) = TABLE_I[k - 1];
            Ok(CatalogEntry::new(name, AlgebraTensor::from_unit_terms(2, terms), ty(ks, ds)))
        }
        (3, 1..=20) => {
            let (terms, ks, ds) = TABLE_II[k - 1];
            Ok(CatalogEntry::new(name, AlgebraTensor::from_unit_terms(3, terms), ty(ks, ds)))
        }
        (3, 21) => Ok(CatalogEntry::new(name, d21(), None)),
        (3, 22) => Ok(CatalogEntry::new(name, d22(C64::new(1.0, 0.0), C64::new(1.0, 0.0)), ty(&[1, 2], &[2, 1]))),
        _ => Err(AlgebraError::UnknownName(name)),
    }
}

/// `e1e1 = e3, e1e2 = e3, e2e1 = −e3`.
pub fn d21() -> AlgebraTensor {
    let one = C64::new(1.0, 0.0);
    AlgebraTensor::from_terms(3, &[(0, 0, 2, one), (0, 1, 2, one), (1, 0, 2, -one)])
        .expect("literal table")
}

/// The two-parameter row `x ψ_3^{1,2} + y ψ_3^{2,1}`.
pub fn d22(x: C64, y: C64) -> AlgebraTensor {
    AlgebraTensor::from_terms(3, &[(0, 1, 2, x), (1, 0, 2, y)]).expect("literal table")
}

/// `μ_l(X_1, X_i) = X_i`.
pub fn mu_l(n: usize) -> AlgebraTensor {
    let terms: Vec<_> = (1..=n).map(|i| (1, i, i)).collect();
    AlgebraTensor::from_unit_terms(n, &terms)
}

/// `μ_r(X_i, X_1) = X_i`.
pub fn mu_r(n: usize) -> AlgebraTensor {
    let terms: Vec<_> = (1..=n).map(|i| (i, 1, i)).collect();
    AlgebraTensor::from_unit_terms(n, &terms)
}

/// `μ_ca(X_1, X_1) = X_2`.
pub fn mu_ca(n: usize) -> AlgebraTensor {
    assert!(n >= 2, "mu_ca needs n ≥ 2");
    AlgebraTensor::from_unit_terms(n, &[(1, 1, 2)])
}

/// `M_m(C)` on the orthonormal frame `{E_ij}`, ordered row-major
/// (`E_ij ↦ e_{(i−1)m + j}`).
pub fn mat(m: usize) -> AlgebraTensor {
    let idx = |i: usize, j: usize| (i - 1) * m + j;
    let mut terms = Vec::with_capacity(m * m * m);
    for i in 1..=m {
        for j in 1..=m {
            for l in 1..=m {
                terms.push((idx(i, j), idx(j, l), idx(i, l)));
            }
        }
    }
    AlgebraTensor::from_unit_terms(m * m, &terms)
}

/// Model isomorphic to `d13@3`: unit `e1`, `e3² = e1`, `e2e3 = e2`,
/// `e3e2 = −e2`.
pub fn u13() -> AlgebraTensor {
    let one = C64::new(1.0, 0.0);
    let t = [(1, 1, 1), (3, 3, 1), (1, 2, 2), (2, 1, 2), (2, 3, 2), (1, 3, 3), (3, 1, 3)];
    let mut terms: Vec<_> = t.iter().map(|&(i, j, k)| (i - 1, j - 1, k - 1, one)).collect();
    terms.push((2, 1, 1, -one));
    AlgebraTensor::from_terms(3, &terms).expect("literal table")
}

/// Model isomorphic to `d17@3`.
pub fn w103() -> AlgebraTensor {
    AlgebraTensor::from_unit_terms(3, &[(1, 2, 1), (2, 1, 1), (2, 2, 2), (2, 3, 3)])
}

/// Model isomorphic to `d18@3`: unit `e1` and a square-zero radical.
pub fn u03() -> AlgebraTensor {
    AlgebraTensor::from_unit_terms(3, &[(1, 1, 1), (1, 2, 2), (2, 1, 2), (1, 3, 3), (3, 1, 3)])
}

fn parse_call(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?
        .trim()
        .parse()
        .ok()
}

/// Looks up a catalog entry by name.
pub fn get(name: &str) -> Result<CatalogEntry, AlgebraError> {
    let unknown = || AlgebraError::UnknownName(name.to_string());
    if let Some(rest) = name.strip_prefix('d') {
        let (k, n) = rest.split_once('@').ok_or_else(unknown)?;
        let k: usize = k.parse().map_err(|_| unknown())?;
        let n: usize = n.parse().map_err(|_| unknown())?;
        return table_entry(n, k).map_err(|_| unknown());
    }
    if let Some(n) = parse_call(name, "mu_l") {
        if n < 2 {
            return Err(unknown());
        }
        return Ok(CatalogEntry::new(name, mu_l(n), ty(&[0, 1], &[1, n - 1])));
    }
    if let Some(n) = parse_call(name, "mu_r") {
        if n < 2 {
            return Err(unknown());
        }
        return Ok(CatalogEntry::new(name, mu_r(n), ty(&[0, 1], &[1, n - 1])));
    }
    if let Some(n) = parse_call(name, "mu_ca") {
        return match n {
            2 => Ok(CatalogEntry::new(name, mu_ca(2), ty(&[1, 2], &[1, 1]))),
            n if n >= 3 => Ok(CatalogEntry::new(name, mu_ca(n), ty(&[3, 5, 6], &[1, n - 2, 1]))),
            _ => Err(unknown()),
        };
    }
    if let Some(m) = parse_call(name, "mat") {
        if m == 0 {
            return Err(unknown());
        }
        return Ok(CatalogEntry::new(name, mat(m), ty(&[0], &[m * m])));
    }
    match name {
        "U13" => Ok(CatalogEntry::new(name, u13(), ty(&[0, 1], &[2, 1]))),
        "W103" => Ok(CatalogEntry::new(name, w103(), ty(&[0, 1], &[1, 2]))),
        "U03" => Ok(CatalogEntry::new(name, u03(), ty(&[0, 1], &[1, 2]))),
        _ => Err(unknown()),
    }
}

/// Every name the catalog resolves, with the parametric families instantiated
/// at small sizes (`mu_*` for n = 2..5, `mat(m)` for m = 1..3).
pub fn names() -> Vec<String> {
    let mut out = Vec::new();
    out.extend((1..=6).map(|k| format!("d{k}@2")));
    out.extend((1..=22).map(|k| format!("d{k}@3")));
    for fam in ["mu_l", "mu_r", "mu_ca"] {
        out.extend((2..=5).map(|n| format!("{fam}({n})")));
    }
    out.extend((1..=3).map(|m| format!("mat({m})")));
    out.extend(["U13", "W103", "U03"].map(String::from));
    out
}

pub fn all() -> Vec<CatalogEntry> {
    names().iter().map(|n| get(n).expect("listed names resolve")).collect()
}
