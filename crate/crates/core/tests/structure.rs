use momentvar::algebra::{catalog, AlgebraTensor};
use momentvar::cla::{CMatrix, C64};
use momentvar::moment::{critical_test, CRITICAL_TOL, MAX_DEN};
use momentvar::sample;
use momentvar::structure::{
    derivation_algebra, eigenspace_split, gamma_structure, nikolayevsky, semidirect_sum, structure_checks,
    substructures, GammaPair, StructureError, DER_TOL,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn entry(name: &str) -> AlgebraTensor {
    catalog::get(name).unwrap().tensor
}

fn unit(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[i] = C64::new(1.0, 0.0);
    v
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn orthonormalize(vs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let n = dot(&w, &w).re.sqrt();
        if n > 1e-10 {
            out.push(w.iter().map(|z| z / n).collect());
        }
    }
    out
}

/// Distance from `v` to the span of `basis`, relative to `|v|`.
fn off_span(basis: &[Vec<C64>], v: &[C64]) -> f64 {
    let q = orthonormalize(basis);
    let mut w = v.to_vec();
    for b in &q {
        let c = dot(b, &w);
        w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
    }
    dot(&w, &w).re.sqrt() / dot(v, v).re.sqrt().max(1e-300)
}

fn same_span(a: &[Vec<C64>], b: &[Vec<C64>]) -> bool {
    orthonormalize(a).len() == orthonormalize(b).len() && b.iter().all(|v| off_span(a, v) < 1e-8)
}

#[test]
fn derivation_examples() {
    assert_eq!(derivation_algebra(&AlgebraTensor::zeros(3), DER_TOL).unwrap().dim(), 9);
    assert_eq!(derivation_algebra(&entry("d1@2"), DER_TOL).unwrap().dim(), 1);
    assert_eq!(derivation_algebra(&catalog::mat(2), DER_TOL).unwrap().dim(), 3);

    let der = derivation_algebra(&catalog::d21(), DER_TOL).unwrap();
    assert_eq!(der.dim(), 4);
    assert!(der.max_residual(&catalog::d21()) < 1e-10);
    for d in &der.basis {
        // e3 spans the square of the algebra, so it is preserved
        assert!(d[(0, 2)].norm() < 1e-10 && d[(1, 2)].norm() < 1e-10);
        assert!((d[(2, 2)] - d[(0, 0)] - d[(1, 1)]).norm() < 1e-10);
        assert!((d[(0, 0)] - d[(1, 1)]).norm() < 1e-10);
    }
}

#[test]
fn der_dimension_is_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for e in catalog::all().into_iter().filter(|e| e.tensor.dim() <= 4) {
        let base = derivation_algebra(&e.tensor, DER_TOL).unwrap().dim();
        for _ in 0..50 {
            let g = sample::random_gl(e.tensor.dim(), 100.0, &mut rng);
            let dim = derivation_algebra(&e.tensor.act_group(&g).unwrap(), DER_TOL).unwrap().dim();
            assert_eq!(dim, base, "{}", e.name);
        }
    }
}

#[test]
fn nikolayevsky_examples() {
    let rats = |name: &str| {
        let r = nikolayevsky(&entry(name)).unwrap();
        r.eigen_rationals.iter().map(|q| (q[0], q[1])).collect::<Vec<_>>()
    };
    assert_eq!(rats("d1@2"), vec![(0, 1), (1, 1)]);
    assert_eq!(rats("d5@2"), vec![(3, 5), (6, 5)]);
    for m in 1..=3 {
        assert!(nikolayevsky(&catalog::mat(m)).unwrap().phi.max_abs() < 1e-10);
    }
    assert!(nikolayevsky(&AlgebraTensor::zeros(2)).is_err());
}

#[test]
fn nikolayevsky_on_the_catalog() {
    for e in catalog::all() {
        let r = nikolayevsky(&e.tensor).unwrap();
        assert!(r.trace_residual < 1e-7, "{}: {}", e.name, r.trace_residual);
        assert_eq!(r.eigen_rationals.len(), e.tensor.dim());
        for (q, x) in r.eigen_rationals.iter().zip(&r.eigenvalues) {
            assert!(q[1] >= 1 && q[1] <= MAX_DEN);
            assert!((q[0] as f64 / q[1] as f64 - x).abs() < 1e-6, "{}", e.name);
        }
        let rep = critical_test(&e.tensor, CRITICAL_TOL).unwrap();
        if rep.critical {
            let mut want: Vec<f64> = rep.d_eigenvalues.iter().map(|d| -d / rep.c).collect();
            want.sort_by(f64::total_cmp);
            for (a, b) in r.eigenvalues.iter().zip(&want) {
                assert!((a - b).abs() < 1e-6, "{}: {:?} vs {want:?}", e.name, r.eigenvalues);
            }
        }
    }
}

#[test]
fn substructure_examples() {
    let s = substructures(&entry("d5@2"), DER_TOL).unwrap();
    assert!(same_span(&s.center, &[unit(2, 0), unit(2, 1)]));
    assert!(same_span(&s.annihilator, &[unit(2, 1)]));
    assert!(same_span(&s.radical, &[unit(2, 0), unit(2, 1)]));

    for m in 1..=3 {
        let s = substructures(&catalog::mat(m), DER_TOL).unwrap();
        assert!(s.radical.is_empty());
        let id: Vec<C64> = CMatrix::identity(m).to_vec();
        assert!(same_span(&s.center, &[id]), "mat({m})");
    }

    let s = substructures(&AlgebraTensor::zeros(3), DER_TOL).unwrap();
    assert_eq!((s.center.len(), s.annihilator.len(), s.radical.len()), (3, 3, 3));

    let bad = AlgebraTensor::from_unit_terms(2, &[(1, 1, 1), (1, 1, 2), (2, 2, 1)]);
    assert!(matches!(substructures(&bad, DER_TOL), Err(StructureError::NotAssociative(_))));
}

#[test]
fn radical_is_a_nilpotent_ideal() {
    for e in catalog::all() {
        let mu = &e.tensor;
        let n = mu.dim();
        let rad = substructures(mu, DER_TOL).unwrap().radical;
        for r in &rad {
            for j in 0..n {
                for p in [mu.product(r, &unit(n, j)), mu.product(&unit(n, j), r)] {
                    if dot(&p, &p).re.sqrt() > 1e-12 {
                        assert!(off_span(&rad, &p) < 1e-8, "{}", e.name);
                    }
                }
            }
        }
        // products of n + 1 radical elements vanish
        let mut layer = rad.clone();
        for _ in 0..n {
            layer = layer.iter().flat_map(|x| rad.iter().map(move |y| mu.product(x, y))).collect();
            layer = orthonormalize(&layer);
        }
        let big: f64 = layer.iter().map(|v| dot(v, v).re.sqrt()).fold(0.0, f64::max);
        assert!(layer.is_empty() || big < 1e-8, "{}", e.name);
    }
}

#[test]
fn eigenspace_examples() {
    let s = eigenspace_split(&CMatrix::from_real_diag(&[0.0, 6.0]), 1e-8).unwrap();
    assert!(s.minus.is_empty());
    assert!(same_span(&s.zero, &[unit(2, 0)]));
    assert!(same_span(&s.plus, &[unit(2, 1)]));

    let s = eigenspace_split(&CMatrix::zeros(3, 3), 1e-8).unwrap();
    assert_eq!(s.zero.len(), 3);

    let s = eigenspace_split(&CMatrix::from_real_diag(&[6.0, 12.0, 10.0]), 1e-8).unwrap();
    assert_eq!((s.minus.len(), s.zero.len(), s.plus.len()), (0, 0, 3));

    let s = eigenspace_split(&CMatrix::from_real_diag(&[-1.0, 0.0, 2.0]), 1e-8).unwrap();
    assert!(same_span(&s.minus, &[unit(3, 0)]));
}

#[test]
fn structure_theorem_on_critical_entries() {
    let mut checked = 0;
    for e in catalog::all() {
        let rep = critical_test(&e.tensor, CRITICAL_TOL).unwrap();
        if !rep.critical {
            assert!(matches!(structure_checks(&e.tensor, &rep), Err(StructureError::NotCritical(_))));
            continue;
        }
        let checks = structure_checks(&e.tensor, &rep).unwrap();
        assert_eq!(checks.clauses.len(), 4);
        assert!(checks.all_passed(), "{}: {:?}", e.name, checks.clauses);
        checked += 1;
    }
    assert!(checked > 30);
}

#[test]
fn d6_and_d15_clauses() {
    let d6 = entry("d6@2");
    let s = substructures(&d6, DER_TOL).unwrap();
    // e2 e1 = e2, so nothing is annihilated
    assert!(s.annihilator.is_empty());
    assert!(same_span(&s.radical, &[unit(2, 1)]));
    let rep = critical_test(&d6, CRITICAL_TOL).unwrap();
    assert!(structure_checks(&d6, &rep).unwrap().all_passed());

    let d15 = entry("d15@3");
    let s = substructures(&d15, DER_TOL).unwrap();
    assert_eq!(s.radical.len(), 3);
    assert!(same_span(&s.annihilator, &[unit(3, 1), unit(3, 2)]));
}

#[test]
fn gamma_examples() {
    let g = gamma_structure(&entry("d5@2")).unwrap();
    let id = GammaPair::new(CMatrix::identity(2), CMatrix::identity(2));
    assert!(g.distance(&id) < 1e-10);
    assert!(id.defect(&entry("d5@2")) < 1e-12);
    let s = 0.5;
    let skew = GammaPair::new(CMatrix::from_real_diag(&[s, s * s]), CMatrix::identity(2));
    assert!(skew.defect(&entry("d5@2")) > 1e-3);
    let fixed = GammaPair::new(CMatrix::from_real_diag(&[1.0, 1.0]), CMatrix::identity(2));
    assert!(fixed.defect(&entry("d5@2")) < 1e-12);

    let z = gamma_structure(&AlgebraTensor::zeros(2)).unwrap();
    assert!(z.degenerate);
    assert!(matches!(gamma_structure(&catalog::mat(2)), Err(StructureError::NotNilpotent { .. })));
}

#[test]
fn semidirect_builds_a_critical_point() {
    let lam = entry("d5@2");
    let rep = critical_test(&lam, CRITICAL_TOL).unwrap();
    assert!((rep.c + 10.0).abs() < 1e-12);
    let id = GammaPair::new(CMatrix::identity(2), CMatrix::identity(2));
    let mu = semidirect_sum(&[id], &lam, &rep).unwrap();
    assert_eq!(mu.dim(), 3);
    assert!(mu.is_associative(1e-12).0);
    let r = critical_test(&mu, CRITICAL_TOL).unwrap();
    assert!(r.residual <= 1e-7);
    assert_eq!(r.type_string(), "(0<1<2;1,1,1)");
    assert!((r.value - 10.0 / 3.0).abs() < 1e-10);
    // the S block is a copy of C, so has no radical
    let s = substructures(&mu, DER_TOL).unwrap();
    assert_eq!(s.radical.len(), 2);
    assert!(off_span(&s.radical, &unit(3, 2)) > 0.5);

    assert_eq!(semidirect_sum(&[], &lam, &rep).unwrap(), lam);
    let nil = GammaPair::new(CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]), CMatrix::zeros(2, 2));
    assert!(semidirect_sum(&[nil], &lam, &rep).is_err());
    let d21 = critical_test(&catalog::d21(), CRITICAL_TOL).unwrap();
    let id = GammaPair::new(CMatrix::identity(3), CMatrix::identity(3));
    assert!(matches!(semidirect_sum(&[id], &catalog::d21(), &d21), Err(StructureError::NotCritical(_))));
}
