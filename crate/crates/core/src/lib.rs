//! Crystalline spectral form factors of unitary random-matrix ensembles.
//!
//! The crate samples three families of unitaries whose eigenphases repel
//! strongly enough to form an "eigenvalue crystal":
//!
//! * the circular β-ensemble, realized exactly by a random-walk (CMV-type)
//!   unitary `U = S L S† M` with Beta-distributed Verblunsky coefficients,
//! * permutation circuits perturbed by a GUE rotation, `U = exp(-igH) S`,
//!   in a global and a local (staircase) variant,
//! * random Lax matrices, whose eigenphases form a hard-rod gas.
//!
//! The spectral form factor `K(t) = <|tr U^t|^2>` is estimated by seeded,
//! worker-count independent Monte Carlo ([`spectral::monte_carlo_sff`]) and
//! compared against closed-form predictions ([`theory`]) through peak
//! extraction and Debye-Waller fits ([`analysis`]).

pub mod analysis;
pub mod config;
pub mod ensembles;
mod error;
pub mod permutation;
pub mod rng;
pub mod spectral;
pub mod theory;
pub mod unitary;

pub use config::{EnsembleSpec, ExperimentConfig, PermutationSpec, StaircasePermutationSpec};
pub use error::{Result, SffError};
pub use permutation::Permutation;
pub use spectral::{EigenphaseSet, SffCurve};
pub use theory::TheoryCurve;
pub use unitary::{HermitianMatrix, UnitaryMatrix};

/// Complex scalar used throughout the crate.
pub use faer::c64;
