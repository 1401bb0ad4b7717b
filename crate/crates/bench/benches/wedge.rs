use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use wedgewalk_bench::{exp_log, square, stairs};
use wedgewalk_core::walker::{self, WalkConfig};
use wedgewalk_core::{flow, geometry, network, DEFAULT_TOL};

fn derive_h(c: &mut Criterion) {
    let p = exp_log();
    c.bench_function("derive_h/1e5", |b| {
        b.iter(|| stairs(&p, black_box(100_000)))
    });
}

fn truncation(c: &mut Criterion) {
    let p = square();
    let h = stairs(&p, 32);
    let mut group = c.benchmark_group("enumerate_truncation");
    for r in [8u64, 16, 32] {
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, &r| {
            b.iter(|| geometry::enumerate_truncation(&h, &p, r).unwrap())
        });
    }
    group.finish();
}

fn resistance(c: &mut Criterion) {
    let p = square();
    let h = stairs(&p, 32);
    let mut group = c.benchmark_group("effective_resistance");
    group.sample_size(20);
    for r in [8u64, 16, 24] {
        let g = network::build_restricted(&p, &h, r).unwrap();
        let sinks = g.sinks();
        group.bench_with_input(BenchmarkId::from_parameter(r), &r, |b, _| {
            b.iter(|| network::effective_resistance(&g, &p.origin(), &sinks, DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn lyons(c: &mut Criterion) {
    let p = square();
    let h = stairs(&p, 32);
    c.bench_function("lyons_flow/32", |b| {
        b.iter(|| flow::lyons_flow(&h, black_box(32)).unwrap())
    });
}

fn collisions(c: &mut Criterion) {
    let p = square();
    let cfg = WalkConfig {
        seed: 1,
        horizon: 10_000,
        trials: 64,
        ..WalkConfig::default()
    };
    let mut group = c.benchmark_group("collision_run");
    group.sample_size(10);
    group.bench_function("T=1e4 x64", |b| {
        b.iter(|| walker::collision_run(&p, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, derive_h, truncation, resistance, lyons, collisions);
criterion_main!(benches);
