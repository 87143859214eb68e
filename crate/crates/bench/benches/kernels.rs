use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cyclav::linalg::{determinant, hnf_basis, smith_normal_form};
use cyclav::order_ideal::NumberField;
use cyclav::{classify_isogeny_class, enumerate_icm};
use cyclav_bench::{contexts, dense_matrix};

fn linalg(c: &mut Criterion) {
    for n in [4, 8] {
        let m = dense_matrix(n, n as u64);
        c.bench_function(&format!("determinant_{n}"), |b| b.iter(|| determinant(black_box(&m))));
        c.bench_function(&format!("hnf_{n}"), |b| b.iter(|| hnf_basis(black_box(m.rows()), n)));
        c.bench_function(&format!("snf_{n}"), |b| b.iter(|| smith_normal_form(black_box(&m))));
    }
}

fn classification(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    group.sample_size(10);
    for (name, ctx) in contexts() {
        let k = NumberField::from_context(&ctx).unwrap();
        let o = k.frobenius_order().unwrap();
        group.bench_function(format!("icm_{name}"), |b| b.iter(|| enumerate_icm(&k, &o, None).unwrap()));
        group.bench_function(format!("full_{name}"), |b| b.iter(|| classify_isogeny_class(&ctx, None).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, linalg, classification);
criterion_main!(benches);
