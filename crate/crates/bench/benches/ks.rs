use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use reasm_core::generators::cube;
use reasm_core::{decompose, gen_hfk, optimal_alpha, run_ks, HFamilyParams};

fn ks_on_h_family(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_ks");
    for (k, f) in [(3, 8), (3, 16), (4, 16), (4, 32)] {
        let g = gen_hfk(HFamilyParams::new(k, f)).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("hfk-k{k}"), g.n()), &g, |b, g| b.iter(|| run_ks(black_box(g)).unwrap()));
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let g = gen_hfk(HFamilyParams::new(4, 32)).unwrap();
    c.bench_function("decompose/hfk-k4-f32", |b| b.iter(|| decompose(black_box(&g)).unwrap()));
}

fn oracle_on_cube(c: &mut Criterion) {
    let g = cube();
    c.bench_function("optimal_alpha/cube", |b| b.iter(|| optimal_alpha(black_box(&g), 16).unwrap()));
}

criterion_group!(benches, ks_on_h_family, decomposition, oracle_on_cube);
criterion_main!(benches);
