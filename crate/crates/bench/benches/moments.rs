use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacobi_moments::moments::{alpha, alpha_k, check_recurrences, omega};

fn bench_moment_polynomials(c: &mut Criterion) {
    let mut group = c.benchmark_group("moment_polynomials");
    for n in [6usize, 10, 13] {
        group.bench_with_input(BenchmarkId::new("alpha", n), &n, |b, &n| {
            b.iter(|| alpha(black_box(n)));
        });
        group.bench_with_input(BenchmarkId::new("omega", n), &n, |b, &n| {
            b.iter(|| omega(black_box(n)));
        });
    }
    group.bench_function("alpha_k/8_pow_3", |b| {
        b.iter(|| alpha_k(black_box(8), black_box(3)));
    });
    group.finish();
}

fn bench_recurrences(c: &mut Criterion) {
    c.bench_function("check_recurrences/6", |b| {
        b.iter(|| check_recurrences(black_box(6)).unwrap());
    });
}

criterion_group!(benches, bench_moment_polynomials, bench_recurrences);
criterion_main!(benches);
