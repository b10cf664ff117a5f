use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nsn_ddu_bench::reference_instance;
use nsn_ddu_core::{
    audit_assumptions, jacobi_solve, pareto_front, scalarized_worst_case, verify_equilibrium,
    JacobiConfig, LeaderProfile,
};

fn bench_scalarized(c: &mut Criterion) {
    let (spec, map) = reference_instance();
    let x = LeaderProfile::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
    c.bench_function("scalarized_worst_case", |b| {
        b.iter(|| scalarized_worst_case(&spec, &map, black_box(&x), &[0.2, 0.8]).unwrap())
    });
}

fn bench_solve(c: &mut Criterion) {
    let (spec, map) = reference_instance();
    let init = LeaderProfile::zeros(&spec);
    let cfg = JacobiConfig::default();
    c.bench_function("jacobi_solve lambda=0.2", |b| {
        b.iter(|| jacobi_solve(&spec, &map, black_box(&[0.2, 0.8]), &init, &cfg).unwrap())
    });
}

fn bench_verify(c: &mut Criterion) {
    let (spec, map) = reference_instance();
    let init = LeaderProfile::zeros(&spec);
    let out = jacobi_solve(&spec, &map, &[0.2, 0.8], &init, &JacobiConfig::default()).unwrap();
    c.bench_function("verify_equilibrium 101x4001", |b| {
        b.iter(|| verify_equilibrium(&spec, &map, black_box(&out.candidate), 101, 4001, 1e-6).unwrap())
    });
}

fn bench_front(c: &mut Criterion) {
    let (spec, map) = reference_instance();
    let x = LeaderProfile::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
    c.bench_function("pareto_front 4001", |b| {
        b.iter(|| pareto_front(&spec, &map, black_box(&x), 4001).unwrap())
    });
}

fn bench_audit(c: &mut Criterion) {
    let (spec, map) = reference_instance();
    c.bench_function("audit_assumptions 1000", |b| {
        b.iter(|| audit_assumptions(&spec, &map, black_box(1000), 1e-9, 0))
    });
}

criterion_group!(
    benches,
    bench_scalarized,
    bench_solve,
    bench_verify,
    bench_front,
    bench_audit
);
criterion_main!(benches);
