use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use momentvar::algebra::{catalog, AlgebraTensor};
use momentvar::exec::Exec;
use momentvar::flow::{flow_to_critical, FlowConfig};
use momentvar::moment::{critical_test, CRITICAL_TOL};
use momentvar::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn conjugated_starts() -> Vec<AlgebraTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut out = Vec::new();
    for name in ["d2@3", "d6@3", "d14@3", "d19@3", "mat(2)", "mu_ca(4)"] {
        let mu = catalog::get(name).unwrap().tensor;
        for _ in 0..4 {
            let g = sample::random_gl(mu.dim(), 100.0, &mut rng);
            out.push(mu.act_group(&g).unwrap());
        }
    }
    out
}

fn random_algebras() -> Vec<AlgebraTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..400).map(|_| sample::random_algebra(4, &mut rng)).collect()
}

fn modes() -> Vec<(&'static str, Exec)> {
    let mut m = vec![("sequential", Exec::Sequential)];
    if Exec::Parallel.is_parallel() {
        m.push(("parallel", Exec::Parallel));
    }
    m
}

fn flows(c: &mut Criterion) {
    let starts = conjugated_starts();
    let cfg = FlowConfig::default();
    let mut group = c.benchmark_group("flow_batch");
    group.sample_size(10);
    for (label, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &exec, |b, &exec| {
            b.iter(|| exec.map(&starts, |mu| flow_to_critical(black_box(mu), &cfg).unwrap().final_value()))
        });
    }
    group.finish();
}

fn critical_tests(c: &mut Criterion) {
    let pool = random_algebras();
    let mut group = c.benchmark_group("critical_test_batch");
    for (label, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(label), &exec, |b, &exec| {
            b.iter(|| exec.map(&pool, |mu| critical_test(black_box(mu), CRITICAL_TOL).unwrap().residual))
        });
    }
    group.finish();
}

criterion_group!(benches, flows, critical_tests);
criterion_main!(benches);
