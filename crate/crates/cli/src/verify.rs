//! Quick in-process oracle checks behind `sff verify`.

use serde::{Deserialize, Serialize};
use sff_core::config::{EigenCheck, EnsembleSpec, LaxLimit, PermutationSpec, StaircasePermutationSpec};
use sff_core::ensembles::circuits::construction_mismatch;
use sff_core::ensembles::{
    build_brickwork, build_walk_multiplexer_unitary, cmv_unitary, sample_cbe_coefficients, CbeParams, Ensemble,
};
use sff_core::rng::{derive_stream, SeedSpec};
use sff_core::spectral::{
    monte_carlo_sff_with, sff_direct_trace, sff_from_phases, sff_relative_error, unitary_eigenphases,
    MonteCarloOptions, DIRECT_TRACE_MAX_DIM,
};
use sff_core::ExperimentConfig;

use crate::error::CliResult;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn default_ensembles() -> Vec<EnsembleSpec> {
    vec![
        EnsembleSpec::Cbe { d: 64, beta: 10.0 },
        EnsembleSpec::Perm {
            d: 64,
            g: 0.1,
            permutation: PermutationSpec::Random { seed: 3 },
        },
        EnsembleSpec::PermLocal {
            qubits: 6,
            block: 3,
            g: 0.05,
            permutation: StaircasePermutationSpec::Random { seed: 3 },
        },
        EnsembleSpec::Lax {
            d: 64,
            g: Some(0.9),
            limit: None,
        },
    ]
}

fn circuit_checks(checks: &mut Vec<Check>) -> CliResult<()> {
    let mut rng = derive_stream(SeedSpec::new(17, 0));
    let coefficients = sample_cbe_coefficients(CbeParams::new(8, 2.0)?, &mut rng)?;
    let cmv = cmv_unitary(&coefficients)?;
    let circuit = build_walk_multiplexer_unitary(&coefficients)?;
    checks.push(Check::at_most(
        "multiplexer_vs_cmv_d8",
        construction_mismatch(&circuit.restricted, &cmv).max(circuit.leakage()),
        1e-12,
    ));
    for l in [3, 4] {
        let coefficients = sample_cbe_coefficients(CbeParams::new(2 * l, 2.0)?, &mut rng)?;
        let cmv = cmv_unitary(&coefficients)?;
        let brickwork = build_brickwork(&coefficients)?;
        let sector = brickwork.one_particle_sector()?;
        checks.push(Check::at_most(
            format!("brickwork_vs_cmv_l{l}"),
            construction_mismatch(&sector, &cmv).max(brickwork.number_violation()),
            1e-12,
        ));
    }
    Ok(())
}

fn oracle_check(spec: &EnsembleSpec, samples: u64) -> CliResult<Check> {
    let ensemble = Ensemble::from_spec(spec)?;
    let d = ensemble.dim();
    let mut worst = 0.0f64;
    for i in 0..samples {
        let u = ensemble.sample_seeded(SeedSpec::new(29, i))?;
        let fast = sff_from_phases(&unitary_eigenphases(&u)?, 512);
        let direct = sff_direct_trace(&u, 512)?;
        worst = worst.max(sff_relative_error(&fast, &direct, d));
    }
    Ok(Check::at_most(format!("phases_vs_trace_{}_d{d}", spec.name()), worst, 1e-8))
}

fn crystal_check(spec: EnsembleSpec) -> CliResult<Check> {
    let ensemble = Ensemble::from_spec(&spec)?;
    let d = ensemble.dim();
    let d2 = (d * d) as f64;
    let mut worst = 0.0f64;
    for i in 0..3 {
        let u = ensemble.sample_seeded(SeedSpec::new(31, i))?;
        let k = sff_from_phases(&unitary_eigenphases(&u)?, 3 * d);
        for (t, v) in k.iter().enumerate() {
            let expected = if t % d == 0 { d2 } else { 0.0 };
            worst = worst.max((v - expected).abs() / d2);
        }
    }
    Ok(Check::at_most(format!("crystal_{}_d{d}", spec.name()), worst, 1e-12))
}

fn determinism_check() -> CliResult<Check> {
    let ensemble = Ensemble::from_spec(&EnsembleSpec::Cbe { d: 16, beta: 4.0 })?;
    let run = |workers| {
        monte_carlo_sff_with(
            &ensemble,
            MonteCarloOptions {
                n_samples: 64,
                master_seed: 7,
                t_max: 64,
                workers,
                eigen_check: EigenCheck::Residual,
            },
        )
    };
    let (a, b) = (run(1)?, run(4)?);
    let differing = a
        .mean
        .iter()
        .zip(&b.mean)
        .chain(a.stderr.iter().zip(&b.stderr))
        .filter(|(x, y)| x.to_bits() != y.to_bits())
        .count();
    Ok(Check::at_most("worker_count_invariance", differing as f64, 0.0))
}

/// Runs the oracle checks; the config's ensemble is added when it is small
/// enough for the repeated-multiplication oracle.
pub fn run_verify(config: Option<&ExperimentConfig>) -> CliResult<VerifyReport> {
    let mut checks = Vec::new();
    circuit_checks(&mut checks)?;
    let mut specs = default_ensembles();
    if let Some(c) = config {
        if c.ensemble.dim() <= DIRECT_TRACE_MAX_DIM {
            specs.push(c.ensemble.clone());
        }
    }
    for spec in &specs {
        checks.push(oracle_check(spec, 3)?);
    }
    checks.push(crystal_check(EnsembleSpec::Cbe {
        d: 16,
        beta: f64::INFINITY,
    })?);
    checks.push(crystal_check(EnsembleSpec::Perm {
        d: 16,
        g: 0.0,
        permutation: PermutationSpec::Cycles { lengths: vec![16] },
    })?);
    checks.push(crystal_check(EnsembleSpec::Lax {
        d: 16,
        g: None,
        limit: Some(LaxLimit::CyclicShift),
    })?);
    checks.push(determinism_check()?);
    Ok(VerifyReport {
        version: crate::run::VERSION.to_string(),
        checks,
    })
}
