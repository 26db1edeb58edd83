use criterion::{criterion_group, criterion_main, Criterion};

use nwe_disc::ensembles::{gram_matrix, make_product_family};
use nwe_disc::minerr::{build_srm_for_family, chen_analysis};
use nwe_disc::numerics::hermitian_eig;
use nwe_disc::unambig::solve_ud_primal;

fn bench_pipeline(c: &mut Criterion) {
    let ensemble = make_product_family(0.5).unwrap();
    let gram = gram_matrix(ensemble.states()).unwrap();
    let rho = nwe_disc::numerics::Hermitian::symmetrized(&ensemble.density()).unwrap();
    let priors = vec![1.0 / 6.0; 6];

    c.bench_function("hermitian_eig 9x9", |b| {
        b.iter(|| hermitian_eig(std::hint::black_box(&rho)).unwrap())
    });
    c.bench_function("build_srm s=0.5", |b| {
        b.iter(|| build_srm_for_family(std::hint::black_box(0.5)).unwrap())
    });
    c.bench_function("solve_ud_primal 6x6", |b| {
        b.iter(|| solve_ud_primal(std::hint::black_box(&gram), &priors).unwrap())
    });
    c.bench_function("chen_analysis s=0.5", |b| {
        b.iter(|| chen_analysis(std::hint::black_box(0.5)).unwrap())
    });
}

criterion_group!(benches, bench_pipeline);
criterion_main!(benches);
