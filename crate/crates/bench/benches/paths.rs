use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacobi_moments::lattice::{count_paths, weight_polynomial, PathKind, WeightKind};

fn bench_counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_paths");
    for n in [8usize, 12] {
        group.bench_with_input(BenchmarkId::new("dyck", n), &n, |b, &n| {
            b.iter(|| count_paths(PathKind::Dyck, black_box(n)).unwrap());
        });
        group.bench_with_input(BenchmarkId::new("generalized", n), &n, |b, &n| {
            b.iter(|| count_paths(PathKind::Generalized, black_box(n)).unwrap());
        });
    }
    group.finish();
}

fn bench_weight_polynomials(c: &mut Criterion) {
    let mut group = c.benchmark_group("weight_polynomial");
    for n in [6usize, 9] {
        group.bench_with_input(BenchmarkId::new("one_sided", n), &n, |b, &n| {
            b.iter(|| weight_polynomial(WeightKind::A, black_box(n)).unwrap());
        });
        group.bench_with_input(BenchmarkId::new("two_sided", n), &n, |b, &n| {
            b.iter(|| weight_polynomial(WeightKind::W, black_box(n)).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_counting, bench_weight_polynomials);
criterion_main!(benches);
