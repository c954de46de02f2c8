use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use eschlab_core::curvature::{CurvatureEngine, TwoPlane};
use eschlab_core::eschenburg::build_certificate_with;
use eschlab_core::rng::seeded;
use eschlab_core::su3::{haar_su3, random_vector};
use eschlab_core::triples::{canonical_form, classify, MoveSet, PQPair};
use eschlab_core::wilking::{almpos_case_engine, hg_values};
use eschlab_core::Tolerances;

fn triples(c: &mut Criterion) {
    let pair = PQPair::new([0, 0, 3], [1, 1, 1]).unwrap();
    c.bench_function("classify", |b| b.iter(|| classify(black_box(&pair)).unwrap()));
    c.bench_function("canonical_form_all_diffeos", |b| {
        b.iter(|| canonical_form(black_box(&pair), MoveSet::AllDiffeos).unwrap())
    });
}

fn curvature(c: &mut Criterion) {
    let engine = CurvatureEngine::deformed(1.0).unwrap();
    let mut rng = seeded(7);
    let plane = TwoPlane::new(random_vector(&mut rng), random_vector(&mut rng));
    c.bench_function("sectional_curvature", |b| {
        b.iter(|| engine.sectional_curvature(black_box(&plane)).unwrap())
    });
    c.bench_function("engine_tabulation", |b| b.iter(|| CurvatureEngine::deformed(black_box(2.0)).unwrap()));
}

fn certificates(c: &mut Criterion) {
    let engine = CurvatureEngine::deformed(1.0).unwrap();
    let pair = PQPair::new([0, 0, 2], [0, 1, 1]).unwrap();
    let a = haar_su3(&mut seeded(11));
    let tol = Tolerances::default();
    c.bench_function("eschenburg_certificate", |b| {
        b.iter(|| build_certificate_with(&engine, black_box(&a), &pair, 1.0, &tol))
    });
    c.bench_function("hg_values", |b| b.iter(|| hg_values(black_box(1.1), [3, 1, -2]).unwrap()));
    c.bench_function("wilking_case_engine", |b| b.iter(|| almpos_case_engine(black_box([3, 1, -2]), 1.0).unwrap()));
}

criterion_group!(benches, triples, curvature, certificates);
criterion_main!(benches);
