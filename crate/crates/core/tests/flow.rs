use momentvar::algebra::{catalog, AlgebraTensor};
use momentvar::cla::{CMatrix, C64};
use momentvar::flow::{detect_degeneration, flow_to_critical, orbit_invariants, FlowConfig, FlowStatus, OrbitInvariants};
use momentvar::moment::{critical_test, FLOW_CRITICAL_TOL};
use momentvar::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entry(name: &str) -> AlgebraTensor {
    catalog::get(name).unwrap().tensor
}

fn assert_descent(f: &[(usize, f64)]) {
    for w in f.windows(2) {
        assert!(w[0].0 < w[1].0);
        assert!(w[1].1 <= w[0].1 * (1.0 + 1e-12), "{:?} -> {:?}", w[0], w[1]);
    }
}

#[test]
fn d21_leaves_its_orbit() {
    let t = flow_to_critical(&catalog::d21(), &FlowConfig::default()).unwrap();
    assert!(t.converged, "{:?}", t.status);
    assert!(detect_degeneration(&t).unwrap());
    assert!(t.final_invariants.der > t.start_invariants.der);
    let r = critical_test(&t.final_tensor, FLOW_CRITICAL_TOL).unwrap();
    assert!(r.critical);
    assert!(t.final_value() < momentvar::f_value(&catalog::d21()).unwrap());
}

#[test]
fn semisimple_orbit_keeps_its_minimum() {
    let g = CMatrix::from_fn(3, 3, |i, j| C64::new(if i == j { 2.0 } else { 0.4 * (i + 2 * j) as f64 }, 0.1 * i as f64));
    let mu = entry("d14@3").act_group(&g).unwrap();
    let t = flow_to_critical(&mu, &FlowConfig::default()).unwrap();
    assert!(t.converged);
    assert!(!detect_degeneration(&t).unwrap());
    assert!((t.final_value() - 4.0 / 3.0).abs() < 1e-6);
    assert_eq!(critical_test(&t.final_tensor, FLOW_CRITICAL_TOL).unwrap().type_string(), "(0;3)");
}

#[test]
fn critical_start_does_not_degenerate() {
    let t = flow_to_critical(&entry("d6@2"), &FlowConfig::default()).unwrap();
    assert!(t.converged && t.iterations <= 2);
    assert!(!detect_degeneration(&t).unwrap());
}

#[test]
fn unconverged_trace_is_rejected() {
    let cfg = FlowConfig { max_iters: 1, ..FlowConfig::default() };
    let t = flow_to_critical(&catalog::d21(), &cfg).unwrap();
    assert!(!t.converged);
    assert_eq!(t.status, FlowStatus::BudgetExhausted);
    assert!(detect_degeneration(&t).is_err());
}

#[test]
fn invariant_examples() {
    assert_eq!(
        orbit_invariants(&entry("d5@2"), 1e-5).unwrap(),
        OrbitInvariants { der: 2, radical: 2, annihilator: 1, center: 2 }
    );
    assert_eq!(orbit_invariants(&AlgebraTensor::zeros(2), 1e-5).unwrap().der, 4);
    assert_eq!(orbit_invariants(&catalog::mat(2), 1e-5).unwrap().der, 3);
}

#[test]
fn trace_serializes_sampled_values() {
    let t = flow_to_critical(&entry("d2@3"), &FlowConfig::default()).unwrap();
    let v = serde_json::to_value(&t).unwrap();
    assert!(v["f_values"].as_array().is_some_and(|a| !a.is_empty()));
    assert!(v.get("iterates").is_none());
    assert_eq!(v["final_tensor"]["dim"], 3);
}

#[test]
fn descent_floor_and_unit_norm_on_random_starts() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cfg = FlowConfig { max_iters: 20_000, ..FlowConfig::default() };
    for k in 0..100 {
        let mu = sample::random_algebra(rng.random_range(2..=4), &mut rng);
        let t = flow_to_critical(&mu, &cfg).unwrap();
        assert_descent(&t.f_values);
        assert!((t.final_tensor.norm() - 1.0).abs() < 1e-10);
        let floor = 4.0 / mu.dim() as f64;
        assert!(t.final_value() >= floor - 1e-6, "sample {k}: {}", t.final_value());
        if t.converged {
            assert!(critical_test(&t.final_tensor, FLOW_CRITICAL_TOL).unwrap().critical, "sample {k}");
        }
    }
}
