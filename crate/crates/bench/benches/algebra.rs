use std::hint::black_box;

use capelli_bench::presentation;
use capelli_core::capalg::{confluence_fuzz, from_word};
use capelli_core::gradmod::{build_ladder, Window};
use capelli_core::{AElement, Letter, Rational};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_products(c: &mut Criterion) {
    let pres = presentation(4, 2);
    let x = from_word(&pres, &[Letter::Delta, Letter::Theta, Letter::F, Letter::F]);
    let y = AElement::f(&pres)
        .add(&AElement::delta(&pres).pow(2))
        .unwrap()
        .add(&AElement::theta(&pres))
        .unwrap();
    c.bench_function("a_mul", |b| b.iter(|| black_box(&x).mul(black_box(&y)).unwrap()));
    c.bench_function("a_pow_8", |b| b.iter(|| black_box(&y).pow(8)));
    c.bench_function("confluence_fuzz_100", |b| b.iter(|| confluence_fuzz(&pres, 100, 1)));
}

fn bench_ladder(c: &mut Criterion) {
    let pres = presentation(8, 4);
    let w = Window::new(-10, 10).unwrap();
    let lambda = Rational::new(1, 3);
    c.bench_function("ladder_validate", |b| {
        b.iter(|| build_ladder(&pres, &lambda, w).validate())
    });
}

criterion_group!(benches, bench_products, bench_ladder);
criterion_main!(benches);
