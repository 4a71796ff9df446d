//! Builders for one sample unitary of each ensemble.

pub mod cbe;
pub mod circuits;
pub mod coulomb_mcmc;
pub mod lax;
pub mod permutation_circuit;
pub mod staircase;

pub use cbe::{build_cbe_unitary, cmv_unitary, sample_cbe_coefficients, CbeCoefficients, CbeParams};
pub use circuits::{build_brickwork, build_brickwork_one_particle, build_walk_multiplexer_unitary};
pub use coulomb_mcmc::{mcmc_coulomb_sample, mcmc_coulomb_samples, CoulombGasChain, McmcRun, McmcSettings};
pub use lax::{build_lax_cyclic_shift, build_lax_diagonal, build_lax_unitary, LaxParams};
pub use permutation_circuit::{build_perturbed_permutation, sample_perturbed_permutation, PermCircuitParams};
pub use staircase::{build_local_staircase, LocalCircuitParams, StaircaseLayout, StaircaseModel};

use crate::config::{EnsembleSpec, LaxLimit, PermutationSpec, StaircasePermutationSpec};
use crate::permutation::Permutation;
use crate::rng::{derive_stream, sample_cyclic_permutation, sample_permutation, SeedSpec, Stream};
use crate::unitary::UnitaryMatrix;
use crate::Result;

/// An ensemble with all per-experiment data fixed (e.g. the permutation),
/// ready to draw independent samples.
#[derive(Debug, Clone)]
pub enum Ensemble {
    Cbe(CbeParams),
    Perm { g: f64, permutation: Permutation },
    Staircase(StaircaseModel),
    Lax { d: usize, g: f64 },
    LaxLimit { d: usize, limit: LaxLimit },
}

impl Ensemble {
    pub fn from_spec(spec: &EnsembleSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec {
            EnsembleSpec::Cbe { d, beta } => Ensemble::Cbe(CbeParams::new(*d, *beta)?),
            EnsembleSpec::Perm { d, g, permutation } => Ensemble::Perm {
                g: *g,
                permutation: resolve_permutation(*d, permutation)?,
            },
            EnsembleSpec::PermLocal {
                qubits,
                block,
                g,
                permutation,
            } => {
                let layout = StaircaseLayout::new(*qubits, *block)?;
                let model = match permutation {
                    StaircasePermutationSpec::Random { seed } => {
                        StaircaseModel::random(layout, *g, &mut derive_stream(SeedSpec::new(*seed, 0)))?
                    }
                    StaircasePermutationSpec::Search {
                        lengths,
                        seed,
                        max_attempts,
                    } => StaircaseModel::search(layout, *g, lengths, *seed, *max_attempts)?.0,
                };
                Ensemble::Staircase(model)
            }
            EnsembleSpec::Lax { d, g: Some(g), .. } => Ensemble::Lax { d: *d, g: *g },
            EnsembleSpec::Lax { d, limit, .. } => Ensemble::LaxLimit {
                d: *d,
                limit: limit.expect("validated"),
            },
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Ensemble::Cbe(p) => p.d,
            Ensemble::Perm { permutation, .. } => permutation.dim(),
            Ensemble::Staircase(m) => m.layout.dim(),
            Ensemble::Lax { d, .. } | Ensemble::LaxLimit { d, .. } => *d,
        }
    }

    /// The fixed classical permutation underlying the model, if any.
    pub fn permutation(&self) -> Option<Permutation> {
        match self {
            Ensemble::Perm { permutation, .. } => Some(permutation.clone()),
            Ensemble::Staircase(m) => Some(m.composed_permutation()),
            _ => None,
        }
    }

    pub fn sample(&self, rng: &mut Stream) -> Result<UnitaryMatrix> {
        match self {
            Ensemble::Cbe(p) => build_cbe_unitary(*p, rng),
            Ensemble::Perm { g, permutation } => sample_perturbed_permutation(*g, permutation, rng),
            Ensemble::Staircase(model) => model.sample(rng),
            Ensemble::Lax { d, g } => {
                let momenta = lax::sample_momenta(rng, *d);
                build_lax_unitary(&LaxParams::new(*g, momenta)?)
            }
            Ensemble::LaxLimit { d, limit } => {
                let momenta = lax::sample_momenta(rng, *d);
                match limit {
                    LaxLimit::CyclicShift => build_lax_cyclic_shift(&momenta),
                    LaxLimit::Diagonal => build_lax_diagonal(&momenta),
                }
            }
        }
    }

    /// Sample `seed.sample_index` of the experiment seeded by `seed.master_seed`.
    pub fn sample_seeded(&self, seed: SeedSpec) -> Result<UnitaryMatrix> {
        self.sample(&mut derive_stream(seed))
    }
}

pub fn resolve_permutation(d: usize, spec: &PermutationSpec) -> Result<Permutation> {
    match spec {
        PermutationSpec::Cycles { lengths } => {
            let p = Permutation::from_cycle_lengths(lengths)?;
            if p.dim() != d {
                return Err(crate::SffError::param(format!("cycle lengths {lengths:?} do not sum to {d}")));
            }
            Ok(p)
        }
        PermutationSpec::Random { seed } => sample_permutation(&mut derive_stream(SeedSpec::new(*seed, 0)), d),
        PermutationSpec::RandomCycle { seed } => {
            sample_cyclic_permutation(&mut derive_stream(SeedSpec::new(*seed, 0)), d)
        }
    }
}
