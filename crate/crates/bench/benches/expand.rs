use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use hga_bench::{enumerate_ha, expand_ha, nested_e, phi_defect};
use hga_core::poly::{check_shc, Pipeline};

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("ha_enumerate");
    for n in [3, 4, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| enumerate_ha(black_box(n))));
    }
    g.finish();
}

fn expansion(c: &mut Criterion) {
    let mut g = c.benchmark_group("ha_expand");
    g.sample_size(20);
    for n in [3, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| expand_ha(black_box(n))));
    }
    g.finish();
    c.bench_function("phi_defect_6", |b| b.iter(|| phi_defect(black_box(6))));
    c.bench_function("nested_e_3_3", |b| b.iter(|| nested_e(black_box(3), black_box(3))));
}

fn poly(c: &mut Criterion) {
    let mut g = c.benchmark_group("poly_shc");
    g.sample_size(10);
    for p in [Pipeline::Expanded, Pipeline::Atomic] {
        g.bench_function(format!("{p:?}_n2"), |b| b.iter(|| check_shc(2, 2, [true; 3], p)));
    }
    g.finish();
}

criterion_group!(benches, enumeration, expansion, poly);
criterion_main!(benches);
