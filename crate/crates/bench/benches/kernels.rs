use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sff_core::config::{EigenCheck, EnsembleSpec, PermutationSpec, StaircasePermutationSpec};
use sff_core::ensembles::Ensemble;
use sff_core::rng::{derive_stream, uniform_phase, SeedSpec};
use sff_core::spectral::{sff_from_phases, unitary_eigenphases_checked, EigenphaseSet};
use sff_core::theory::cbe_gaussian_sff;

fn ensembles(d: usize) -> Vec<EnsembleSpec> {
    vec![
        EnsembleSpec::Cbe { d, beta: 100.0 },
        EnsembleSpec::Perm {
            d,
            g: 0.05,
            permutation: PermutationSpec::RandomCycle { seed: 1 },
        },
        EnsembleSpec::Lax {
            d,
            g: Some(0.98),
            limit: None,
        },
    ]
}

fn bench_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    for d in [64, 256] {
        for spec in ensembles(d) {
            let ensemble = Ensemble::from_spec(&spec).unwrap();
            let mut i = 0;
            group.bench_with_input(BenchmarkId::new(spec.name(), d), &ensemble, |b, e| {
                b.iter(|| {
                    i += 1;
                    e.sample_seeded(SeedSpec::new(1, i)).unwrap()
                })
            });
        }
    }
    let staircase = Ensemble::from_spec(&EnsembleSpec::PermLocal {
        qubits: 8,
        block: 3,
        g: 0.002,
        permutation: StaircasePermutationSpec::Random { seed: 1 },
    })
    .unwrap();
    group.bench_function("perm_local/256", |b| {
        let mut i = 0;
        b.iter(|| {
            i += 1;
            staircase.sample_seeded(SeedSpec::new(1, i)).unwrap()
        })
    });
    group.finish();
}

fn bench_eigenphases(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenphases");
    group.sample_size(20);
    for d in [64, 128, 256] {
        let u = Ensemble::from_spec(&EnsembleSpec::Cbe { d, beta: 10.0 })
            .unwrap()
            .sample_seeded(SeedSpec::new(2, 0))
            .unwrap();
        for check in [EigenCheck::Residual, EigenCheck::Trace] {
            group.bench_with_input(BenchmarkId::new(format!("{check:?}"), d), &u, |b, u| {
                b.iter(|| unitary_eigenphases_checked(black_box(u), check).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_sff(c: &mut Criterion) {
    let mut group = c.benchmark_group("sff_from_phases");
    let mut rng = derive_stream(SeedSpec::new(3, 0));
    for (d, t_max) in [(128, 512), (512, 2048), (512, 20_480)] {
        let phases = EigenphaseSet::from_unsorted((0..d).map(|_| uniform_phase(&mut rng)).collect());
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), t_max), &phases, |b, p| {
            b.iter(|| sff_from_phases(black_box(p), t_max))
        });
    }
    group.finish();
}

fn bench_theory(c: &mut Criterion) {
    c.bench_function("cbe_gaussian_sff/d512", |b| {
        b.iter(|| cbe_gaussian_sff(512, black_box(500.0), black_box(1000.0)))
    });
}

criterion_group!(benches, bench_sampling, bench_eigenphases, bench_sff, bench_theory);
criterion_main!(benches);
