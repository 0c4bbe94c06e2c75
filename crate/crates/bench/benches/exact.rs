use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use logid_core::binomsum::{joint_sum, morris_sum, selberg_sum};
use logid_core::closedform::{hyp3f2_unit, poisson_i, selberg_product};

fn binomial_sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("binomsum");
    g.sample_size(20);
    g.bench_function("selberg N=4 lambda=2", |b| b.iter(|| selberg_sum(black_box(4), black_box(2)).unwrap()));
    g.bench_function("joint n=2 m=2 lambda=1", |b| b.iter(|| joint_sum(black_box(2), black_box(2), black_box(1)).unwrap()));
    g.bench_function("morris N=3 a=1 b=2 lambda=2", |b| {
        b.iter(|| morris_sum(black_box(3), black_box(1), black_box(2), black_box(2)).unwrap())
    });
    g.finish();
}

fn closed_forms(c: &mut Criterion) {
    let l = -0.05;
    c.bench_function("3F2 unit argument", |b| {
        b.iter(|| hyp3f2_unit(black_box(-4.0 * l), 1.0 + 2.0 * l, 2.0 + 8.0 * l, 2.0 + 4.0 * l, 3.0 + 10.0 * l).unwrap())
    });
    c.bench_function("poisson I_4", |b| b.iter(|| poisson_i(4, black_box(l)).unwrap()));
    c.bench_function("gamma product N=6", |b| b.iter(|| selberg_product(6, black_box(l), 0.3, 0.2).unwrap()));
}

criterion_group!(benches, binomial_sums, closed_forms);
criterion_main!(benches);
