use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gilbert_bench::random_functional;
use gilbert_core::bell::{bell2_exact_oracle, bell2_heuristic_oracle, bell3_exact_oracle};
use gilbert_core::steering::{steering_exact_oracle, steering_seesaw_oracle};

fn bell(c: &mut Criterion) {
    let mut group = c.benchmark_group("bell2");
    for n in [4usize, 8, 12, 16] {
        let w = random_functional(n * n, n as u64);
        group.bench_with_input(BenchmarkId::new("exact", n), &w, |b, w| {
            b.iter(|| bell2_exact_oracle(black_box(w), 30).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("heuristic-64", n), &w, |b, w| {
            b.iter(|| bell2_heuristic_oracle(black_box(w), 64, 0).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("bell3");
    for n in [2usize, 3, 4] {
        let w = random_functional(n * n * n, n as u64);
        group.bench_with_input(BenchmarkId::new("exact", n), &w, |b, w| {
            b.iter(|| bell3_exact_oracle(black_box(w), 12).unwrap())
        });
    }
    group.finish();
}

fn steering(c: &mut Criterion) {
    let mut group = c.benchmark_group("steering");
    for n in [10usize, 16, 20] {
        let w = random_functional(3 * n, n as u64);
        group.bench_with_input(BenchmarkId::new("exact", n), &w, |b, w| {
            b.iter(|| steering_exact_oracle(black_box(w), 24).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("seesaw-100", n), &w, |b, w| {
            b.iter(|| steering_seesaw_oracle(black_box(w), 100, 0).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bell, steering);
criterion_main!(benches);
