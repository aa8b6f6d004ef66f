use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacobi_moments::polycore::rat_int;
use jacobi_moments::spectra::{
    expected_entry, mc_estimate, sample_subdiagonal, Distribution, McStatistic,
};

fn uniform() -> Distribution {
    Distribution::uniform(rat_int(1)).unwrap()
}

fn bench_sampling(c: &mut Criterion) {
    let dist = uniform();
    let mut group = c.benchmark_group("sample_subdiagonal");
    for dim in [32usize, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &dim| {
            b.iter(|| sample_subdiagonal(black_box(&dist), black_box(dim), 1, 0));
        });
    }
    group.finish();
}

fn bench_estimates(c: &mut Criterion) {
    let dist = uniform();
    let mut group = c.benchmark_group("mc_estimate");
    group.bench_function("entry/dim7_pow4_n1000", |b| {
        b.iter(|| {
            mc_estimate(
                McStatistic::Entry { dim: 7, power: 4 },
                black_box(&dist),
                1,
                1000,
            )
            .unwrap()
        });
    });
    group.bench_function("spectral/dim20_pow4_n200", |b| {
        b.iter(|| {
            mc_estimate(
                McStatistic::SpectralMoment { dim: 20, power: 4 },
                black_box(&dist),
                1,
                200,
            )
            .unwrap()
        });
    });
    group.finish();
}

fn bench_exact_reference(c: &mut Criterion) {
    let dist = uniform();
    c.bench_function("expected_entry/dim7_pow8", |b| {
        b.iter(|| expected_entry(black_box(7), black_box(8), &dist).unwrap());
    });
}

criterion_group!(benches, bench_sampling, bench_estimates, bench_exact_reference);
criterion_main!(benches);
