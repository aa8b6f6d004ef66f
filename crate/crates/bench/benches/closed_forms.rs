use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacobi_moments::lattice::{closed_form, ClosedForm};

fn bench_closed_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("closed_form");
    let cases = [
        ("composition_sum", ClosedForm::FlajoletA),
        ("pair_sum", ClosedForm::TheoremW),
        ("nested_sum", ClosedForm::TouchardA),
        ("nested_signed_sum", ClosedForm::NestedW),
    ];
    for n in [5usize, 8] {
        for (name, kind) in cases {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| closed_form(black_box(kind), black_box(n)).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_closed_forms);
criterion_main!(benches);
