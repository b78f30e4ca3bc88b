use capelli_bench::instance;
use capelli_core::bsat::{compute_b, verify_omega0_with};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_compute_b(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_b");
    group.sample_size(10);
    for (case_id, size) in [(1, 2), (2, 2), (3, 4), (4, 2), (4, 3), (7, 7)] {
        let inst = instance(case_id, size);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{case_id}-{size}")),
            &inst,
            |b, inst| b.iter(|| compute_b(inst).unwrap()),
        );
    }
    group.finish();
}

fn bench_omega0(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_omega0");
    group.sample_size(10);
    for (case_id, size) in [(1, 2), (4, 2), (5, 2)] {
        let inst = instance(case_id, size);
        let (b, k) = compute_b(&inst).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{case_id}-{size}")),
            &inst,
            |bench, inst| bench.iter(|| verify_omega0_with(inst, &b, &k, 6).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_compute_b, bench_omega0);
criterion_main!(benches);
