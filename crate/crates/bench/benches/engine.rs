use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gilbert_bench::{buckyball_target, werner_target};
use gilbert_core::bell::Bipartite;
use gilbert_core::sets::BoxSet;
use gilbert_core::steering::UnsteerableSet;
use gilbert_core::{run, RunConfig};

fn budget(iterations: usize, memory: usize) -> RunConfig {
    RunConfig {
        max_iterations: iterations,
        memory_capacity: memory,
        run_to_budget: true,
        ..RunConfig::default()
    }
}

fn rectangle(c: &mut Criterion) {
    let rect = BoxSet::rectangle();
    c.bench_function("rectangle/plain-10k", |b| {
        b.iter(|| run(black_box(&[0.0, 1.0]), &rect, &budget(10_000, 1)).unwrap())
    });
}

fn werner(c: &mut Criterion) {
    let mut group = c.benchmark_group("werner-separation");
    for m in [1usize, 10] {
        let r = werner_target(4, 0.9, 1);
        let set = Bipartite::new(4);
        group.bench_with_input(BenchmarkId::new("memory", m), &r, |b, r| {
            b.iter(|| run(black_box(r), &set, &budget(1_000, m)).unwrap())
        });
    }
    group.finish();
}

fn steering(c: &mut Criterion) {
    let mut group = c.benchmark_group("steering-1k");
    group.sample_size(10);
    let r = buckyball_target(0.51);
    let set = UnsteerableSet::new(30);
    for m in [1usize, 100] {
        group.bench_with_input(BenchmarkId::new("memory", m), &r, |b, r| {
            b.iter(|| run(black_box(r), &set, &budget(1_000, m)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, rectangle, werner, steering);
criterion_main!(benches);
