mod common;

use std::f64::consts::{PI, TAU};

use sff_core::c64;
use sff_core::config::{EigenCheck, EnsembleSpec, LaxLimit, PermutationSpec, StaircasePermutationSpec};
use sff_core::ensembles::Ensemble;
use sff_core::rng::{derive_stream, uniform_phase, SeedSpec};
use sff_core::spectral::{
    monte_carlo_sff_with, sff_direct_trace, sff_from_phases, sff_relative_error, unitary_eigenphases,
    unitary_eigenphases_checked, EigenphaseSet, MonteCarloOptions,
};
use sff_core::unitary::phased_permutation_matrix;
use sff_core::{Permutation, UnitaryMatrix};

fn d64_ensembles() -> Vec<EnsembleSpec> {
    vec![
        EnsembleSpec::Cbe { d: 64, beta: 2.0 },
        EnsembleSpec::Cbe { d: 64, beta: 200.0 },
        EnsembleSpec::Perm {
            d: 64,
            g: 0.1,
            permutation: PermutationSpec::Random { seed: 1 },
        },
        EnsembleSpec::PermLocal {
            qubits: 6,
            block: 3,
            g: 0.05,
            permutation: StaircasePermutationSpec::Random { seed: 1 },
        },
        EnsembleSpec::Lax {
            d: 64,
            g: Some(0.7),
            limit: None,
        },
    ]
}

#[test]
fn phases_agree_with_repeated_multiplication() {
    for spec in d64_ensembles() {
        let ensemble = Ensemble::from_spec(&spec).unwrap();
        for i in 0..3 {
            let u = ensemble.sample_seeded(SeedSpec::new(31, i)).unwrap();
            let phases = unitary_eigenphases(&u).unwrap();
            let fast = sff_from_phases(&phases, 512);
            let direct = sff_direct_trace(&u, 512).unwrap();
            let err = sff_relative_error(&fast, &direct, 64);
            assert!(err <= 1e-8, "{}: relative error {err}", spec.name());
        }
    }
}

#[test]
fn trace_check_reproduces_the_trace() {
    for spec in d64_ensembles() {
        let ensemble = Ensemble::from_spec(&spec).unwrap();
        let u = ensemble.sample_seeded(SeedSpec::new(32, 0)).unwrap();
        for check in [EigenCheck::Residual, EigenCheck::Trace] {
            let (phases, report) = unitary_eigenphases_checked(&u, check).unwrap();
            assert!(report.residual <= 1e-8 * 64.0);
            let tr = u.trace();
            let rebuilt = phases.power_trace(1);
            assert!((rebuilt - tr).norm() <= 1e-8 * tr.norm().max(1.0), "{}", spec.name());
        }
    }
}

#[test]
fn permutation_with_cycles_three_and_two() {
    let perm = Permutation::from_cycle_lengths(&[3, 2]).unwrap();
    let u = UnitaryMatrix::new(phased_permutation_matrix(perm.mapping(), &[0.0; 5])).unwrap();
    let direct = sff_direct_trace(&u, 12).unwrap();
    let fast = sff_from_phases(&unitary_eigenphases(&u).unwrap(), 12);
    let tr = u.trace().norm_sqr();
    for k in [&direct, &fast] {
        assert!((k[6] - 25.0).abs() < 1e-10);
        assert!((k[1] - tr).abs() < 1e-10);
        assert!((k[0] - 25.0).abs() < 1e-10);
        // t = 2, 4: only the 2-cycle returns; t = 3: only the 3-cycle
        assert!((k[2] - 4.0).abs() < 1e-10);
        assert!((k[3] - 9.0).abs() < 1e-10);
        assert!(k[5].abs() < 1e-10);
    }
}

#[test]
fn incremental_rotation_does_not_drift() {
    let mut rng = derive_stream(SeedSpec::new(33, 0));
    let phases = EigenphaseSet::from_unsorted((0..64).map(|_| uniform_phase(&mut rng)).collect());
    let t_max = 1_000_000;
    let k = sff_from_phases(&phases, t_max);
    for t in [1023, 1024, 1025, 99_999, 500_001, 999_999, 1_000_000] {
        let direct: c64 = phases.phases().iter().map(|&e| c64::cis(e * t as f64)).sum();
        let exact = direct.norm_sqr();
        let rel = (k[t] - exact).abs() / exact.max(64.0);
        assert!(rel <= 1e-6, "t = {t}: {rel}");
    }
}

#[test]
fn basic_eigenphase_cases() {
    let id = UnitaryMatrix::new(faer::Mat::identity(5, 5)).unwrap();
    assert!(unitary_eigenphases(&id).unwrap().phases().iter().all(|p| p.abs() < 1e-13));
    let shift = UnitaryMatrix::new(phased_permutation_matrix(&[1, 2, 3, 0], &[0.0; 4])).unwrap();
    let p = unitary_eigenphases(&shift).unwrap();
    let mut want = vec![-PI / 2.0, 0.0, PI / 2.0, PI];
    for got in p.phases() {
        let i = (0..want.len())
            .min_by(|&a, &b| common::circle_distance(*got, want[a]).total_cmp(&common::circle_distance(*got, want[b])))
            .unwrap();
        assert!(common::circle_distance(*got, want[i]) < 1e-12);
        want.remove(i);
    }
    assert!(p.phases().iter().all(|&x| x > -PI && x <= PI));
}

#[test]
fn equally_spaced_and_single_level() {
    let crystal = EigenphaseSet::from_unsorted((0..4).map(|n| TAU * n as f64 / 4.0).collect());
    let k = sff_from_phases(&crystal, 4);
    assert_eq!(k[0], 16.0);
    assert!(k[1] < 1e-24 && k[2] < 1e-24 && k[3] < 1e-24);
    assert!((k[4] - 16.0).abs() < 1e-12);
    let single = EigenphaseSet::from_unsorted(vec![0.7]);
    assert!(sff_from_phases(&single, 100).iter().all(|x| (x - 1.0).abs() < 1e-13));
}

fn options(n: usize, t_max: usize, workers: usize) -> MonteCarloOptions {
    MonteCarloOptions {
        n_samples: n,
        master_seed: 2025,
        t_max,
        workers,
        eigen_check: EigenCheck::Residual,
    }
}

#[test]
fn monte_carlo_is_worker_count_invariant() {
    let ensemble = Ensemble::from_spec(&EnsembleSpec::Cbe { d: 16, beta: 3.0 }).unwrap();
    let one = monte_carlo_sff_with(&ensemble, options(300, 64, 1)).unwrap();
    let three = monte_carlo_sff_with(&ensemble, options(300, 64, 3)).unwrap();
    let eight = monte_carlo_sff_with(&ensemble, options(300, 64, 8)).unwrap();
    for other in [&three, &eight] {
        assert_eq!(
            one.mean.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            other.mean.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        assert_eq!(
            one.stderr.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            other.stderr.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }
    assert_eq!(one.mean[0], 256.0);
    assert_eq!(one.stderr[0], 0.0);
    assert!(one.mean.iter().all(|&k| k >= 0.0));
    assert_eq!(one.n_samples, 300);
    assert_eq!(one.n_failed, 0);
}

#[test]
fn monte_carlo_rejects_too_few_samples() {
    let ensemble = Ensemble::from_spec(&EnsembleSpec::Cbe { d: 4, beta: 1.0 }).unwrap();
    assert!(monte_carlo_sff_with(&ensemble, options(1, 8, 1)).is_err());
    assert!(monte_carlo_sff_with(&ensemble, options(10, 8, 0)).is_err());
}

#[test]
fn crystal_limits_have_zero_spread() {
    // every sample of these ensembles has K(t) = d^2 [t = 0 mod d] up to rounding
    let d = 16;
    for spec in [
        EnsembleSpec::Cbe {
            d,
            beta: f64::INFINITY,
        },
        EnsembleSpec::Lax {
            d,
            g: None,
            limit: Some(LaxLimit::CyclicShift),
        },
    ] {
        let ensemble = Ensemble::from_spec(&spec).unwrap();
        let curve = monte_carlo_sff_with(&ensemble, options(2, 3 * d, 1)).unwrap();
        for t in 0..=3 * d {
            let expected = if t % d == 0 { (d * d) as f64 } else { 0.0 };
            assert!((curve.mean[t] - expected).abs() <= 1e-10 * (d * d) as f64);
            assert!(curve.stderr[t] <= 1e-10 * (d * d) as f64);
        }
    }
}

#[test]
fn unperturbed_permutation_statistics() {
    // cycles (5, 3) with independent phase products per cycle
    let ensemble = Ensemble::from_spec(&EnsembleSpec::Perm {
        d: 8,
        g: 0.0,
        permutation: PermutationSpec::Cycles { lengths: vec![5, 3] },
    })
    .unwrap();
    let curve = monte_carlo_sff_with(&ensemble, options(10_000, 30, 1)).unwrap();
    for t in 1..=30usize {
        let (a, b) = (t % 5 == 0, t % 3 == 0);
        match (a, b) {
            (false, false) => assert!(curve.mean[t] < 1e-20, "t = {t}: {}", curve.mean[t]),
            (true, false) => assert!((curve.mean[t] - 25.0).abs() < 1e-9 && curve.stderr[t] < 1e-9),
            (false, true) => assert!((curve.mean[t] - 9.0).abs() < 1e-9 && curve.stderr[t] < 1e-9),
            (true, true) => {
                // |5 e^{i a} + 3 e^{i b}|^2 averages to 25 + 9
                let dev = (curve.mean[t] - 34.0).abs();
                assert!(dev < 5.0 * curve.stderr[t], "t = {t}: {} +- {}", curve.mean[t], curve.stderr[t]);
            }
        }
    }
}
