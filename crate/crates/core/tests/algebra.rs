use momentvar::algebra::{catalog, parse_json, to_json, to_json_value, AlgebraError, AlgebraTensor};
use momentvar::cla::{self, CMatrix, C64};
use momentvar::moment::{critical_test, CRITICAL_TOL};
use momentvar::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn entry(name: &str) -> AlgebraTensor {
    catalog::get(name).unwrap().tensor
}

#[test]
fn identity_and_scalar_actions() {
    let mu = entry("d19@3");
    assert_eq!(mu.act_group(&CMatrix::identity(3)).unwrap(), mu);
    let t = 2.5;
    let scaled = mu.act_group(&CMatrix::identity(3).scale_real(t)).unwrap();
    assert!((scaled.norm() - mu.norm() / t).abs() < 1e-12);
}

#[test]
fn d21_pullback_frame() {
    let a = 1.7;
    let g = CMatrix::from_real_diag(&[1.0 / a, 1.0, 1.0]);
    let mu = catalog::d21().act_group(&g).unwrap();
    let want = AlgebraTensor::from_terms(3, &[(0, 0, 2, c(a * a)), (0, 1, 2, c(a)), (1, 0, 2, c(-a))]).unwrap();
    assert!(mu.rel_distance(&want) < 1e-14);
}

#[test]
fn lie_action_examples() {
    let mu = entry("d15@3");
    let minus = mu.act_lie(&CMatrix::identity(3)).unwrap();
    assert_eq!(minus, mu.scale_real(-1.0));

    let d1 = entry("d1@2");
    assert!(d1.act_lie(&CMatrix::from_real_diag(&[0.0, 2.0])).unwrap().is_zero());

    let d5 = entry("d5@2");
    let e11 = CMatrix::from_real_diag(&[1.0, 0.0]);
    let out = d5.act_lie(&e11).unwrap();
    assert_eq!(out.terms(), vec![(0, 0, 1, c(-2.0))]);
}

#[test]
fn inner_products() {
    let d6 = entry("d6@2");
    assert_eq!(d6.inner_product(&d6).unwrap(), c(3.0));
    assert_eq!(d6.inner_product(&AlgebraTensor::zeros(2)).unwrap(), c(0.0));
    assert_eq!(entry("d5@2").inner_product(&entry("d1@2")).unwrap(), c(0.0));
    assert!(matches!(
        d6.inner_product(&AlgebraTensor::zeros(3)),
        Err(AlgebraError::DimensionMismatch { .. })
    ));
}

#[test]
fn associativity() {
    for e in catalog::all() {
        assert!(e.tensor.is_associative(1e-9).0, "{}", e.name);
    }
    assert!(AlgebraTensor::zeros(3).is_associative(1e-9).0);
    let bad = AlgebraTensor::from_unit_terms(2, &[(1, 1, 1), (1, 1, 2), (2, 2, 1)]);
    let (ok, worst) = bad.is_associative(1e-9);
    assert!(!ok && worst > 0.5);
}

#[test]
fn direct_sums() {
    let one = catalog::mat(1);
    let d4 = one.direct_sum(&one, c(1.0)).unwrap();
    assert_eq!(d4, entry("d4@2"));
    assert_eq!(one.direct_sum(&AlgebraTensor::zeros(0), c(1.0)).unwrap(), one);
    assert!(matches!(one.direct_sum(&one, c(0.0)), Err(AlgebraError::ZeroScale)));

    // balanced sum of two critical points is critical
    let d1 = entry("d1@2");
    let d5 = entry("d5@2");
    let (c1, c5) = (critical_test(&d1, CRITICAL_TOL).unwrap().c, critical_test(&d5, CRITICAL_TOL).unwrap().c);
    let sum = d1.direct_sum(&d5, c((c1 / c5).sqrt())).unwrap();
    assert_eq!(sum.dim(), 4);
    assert!(critical_test(&sum, CRITICAL_TOL).unwrap().critical);
    let unbalanced = d1.direct_sum(&d5, c(1.0)).unwrap();
    assert!(!critical_test(&unbalanced, CRITICAL_TOL).unwrap().critical);
}

#[test]
fn catalog_lookups() {
    let d15 = catalog::get("d15@3").unwrap();
    assert_eq!(d15.tensor.terms(), vec![(0, 0, 1, c(1.0))]);
    assert_eq!(d15.expected_type.unwrap().to_string(), "(3<5<6;1,1,1)");
    assert!((d15.expected_value.unwrap() - 20.0).abs() < 1e-12);

    assert_eq!(catalog::get("mat(1)").unwrap().tensor.terms(), vec![(0, 0, 0, c(1.0))]);

    let l4 = catalog::get("mu_l(4)").unwrap();
    let want: Vec<_> = (0..4).map(|i| (0, i, i, c(1.0))).collect();
    assert_eq!(l4.tensor.terms(), want);
    assert_eq!(l4.expected_type.unwrap().to_string(), "(0<1;1,3)");
    assert_eq!(l4.expected_value, Some(4.0));

    assert!(matches!(catalog::get("d99@3"), Err(AlgebraError::UnknownName(_))));
    assert!(matches!(catalog::get("mu_l(1)"), Err(AlgebraError::UnknownName(_))));
    assert_eq!(catalog::names().len(), catalog::all().len());
}

#[test]
fn json_round_trip() {
    let d5 = parse_json(r#"{"dim":2,"terms":[{"i":1,"j":1,"k":2,"c":[1,0]}]}"#).unwrap();
    assert_eq!(d5, entry("d5@2"));
    for e in catalog::all() {
        assert_eq!(parse_json(&to_json(&e.tensor)).unwrap(), e.tensor, "{}", e.name);
    }
    let d22 = to_json_value(&entry("d22@3"));
    let want: serde_json::Value = serde_json::from_str(
        r#"{"dim":3,"terms":[{"i":1,"j":2,"k":3,"c":[1.0,0.0]},{"i":2,"j":1,"k":3,"c":[1.0,0.0]}]}"#,
    )
    .unwrap();
    assert_eq!(d22, want);
}

#[test]
fn json_errors() {
    for bad in [
        r#"{"dim":2,"terms":[{"i":3,"j":1,"k":1,"c":[1,0]}]}"#,
        r#"{"dim":2,"terms":[{"i":0,"j":1,"k":1,"c":[1,0]}]}"#,
        r#"{"dim":2,"terms":[{"i":1,"j":1,"k":1,"c":[1,0]},{"i":1,"j":1,"k":1,"c":[2,0]}]}"#,
        r#"{"dim":2,"terms":[{"i":1,"j":1,"k":1,"c":[1]}]}"#,
        r#"{"dim":2"#,
    ] {
        assert!(parse_json(bad).is_err(), "{bad}");
    }
}

#[test]
fn action_is_a_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for e in catalog::all().iter().filter(|e| e.tensor.dim() <= 4) {
        let n = e.tensor.dim();
        let g = sample::random_unitary(n, &mut rng);
        let h = sample::random_unitary(n, &mut rng);
        let lhs = e.tensor.act_group(&(&g * &h)).unwrap();
        let rhs = e.tensor.act_group(&h).unwrap().act_group(&g).unwrap();
        assert!(lhs.rel_distance(&rhs) < 1e-10, "{}", e.name);
    }
}

#[test]
fn metric_is_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let mu = sample::random_tensor(3, &mut rng);
        let lam = sample::random_tensor(3, &mut rng);
        let k = sample::random_unitary(3, &mut rng);
        let a = mu.act_group(&k).unwrap().inner_product(&lam.act_group(&k).unwrap()).unwrap();
        let b = mu.inner_product(&lam).unwrap();
        assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
    }
}

#[test]
fn lie_action_is_the_derivative_of_the_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let mu = sample::random_algebra(3, &mut rng);
        let n = mu.dim();
        let a = sample::random_gl(n, 1e3, &mut rng);
        let h = 1e-5;
        let plus = mu.act_group(&cla::expm(&a.scale_real(h))).unwrap();
        let minus = mu.act_group(&cla::expm(&a.scale_real(-h))).unwrap();
        let fd = plus.sub(&minus).unwrap().scale_real(0.5 / h);
        let exact = mu.act_lie(&a).unwrap();
        assert!(fd.rel_distance(&exact) < 1e-6, "{}", fd.rel_distance(&exact));
    }
}

#[test]
fn associativity_is_an_isomorphism_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for e in catalog::all() {
        let g = sample::random_gl(e.tensor.dim(), 50.0, &mut rng);
        let mu = e.tensor.act_group(&g).unwrap();
        assert!(mu.is_associative(1e-7).0, "{}", e.name);
    }
}
