//! Experiment description shared by the Monte-Carlo driver and the CLI.
//!
//! A config is plain data: it round-trips through serde and is validated by
//! [`ExperimentConfig::validate`] before anything is computed. Error messages
//! carry the dotted path of the offending field.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::{Result, SffError};

/// Largest dense dimension the builders accept.
pub const MAX_DIM: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleSpec,
    pub n_samples: usize,
    pub master_seed: u64,
    pub t_max: usize,
    /// Worker threads; `None` means the available parallelism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Theory overlays emitted by `run_theory`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theory: Vec<TheoryKind>,
    /// Optional fractional grid `tau = t/d` for theory curves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory_grid: Option<TauGrid>,
    #[serde(default)]
    pub eigen_check: EigenCheck,
    /// Override for the Gaussian-approximation constant `C`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSpec {
    /// Circular beta-ensemble through the random-walk unitary. `beta = inf`
    /// forces every Verblunsky coefficient to zero.
    Cbe { d: usize, beta: f64 },
    /// `U = exp(-igH) S` with a global GUE matrix and a fixed permutation.
    Perm {
        d: usize,
        g: f64,
        permutation: PermutationSpec,
    },
    /// Staircase circuit of `block`-qubit gates on a chain of `qubits` qubits.
    PermLocal {
        qubits: usize,
        block: usize,
        g: f64,
        permutation: StaircasePermutationSpec,
    },
    /// Random Lax matrix; exactly one of `g` and `limit` must be given.
    Lax {
        d: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        limit: Option<LaxLimit>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaxLimit {
    /// `g -> 1`: `U_mn = e^{i p_m} delta_{m+1, n}`.
    CyclicShift,
    /// `g -> 0`: `U = diag(e^{i p_m})`.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PermutationSpec {
    /// Canonical permutation with these cycle lengths (must sum to `d`).
    Cycles { lengths: Vec<usize> },
    /// Uniformly random permutation drawn from its own seed.
    Random { seed: u64 },
    /// Uniformly random single `d`-cycle drawn from its own seed.
    RandomCycle { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StaircasePermutationSpec {
    /// Local block permutations drawn from `seed`.
    Random { seed: u64 },
    /// Redraw the local permutations (attempt `a` uses stream `(seed, a)`)
    /// until the composed permutation has exactly these cycle lengths.
    Search {
        lengths: Vec<usize>,
        seed: u64,
        #[serde(default = "default_max_attempts")]
        max_attempts: u64,
    },
}

fn default_max_attempts() -> u64 {
    1_000_000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryKind {
    CbeGaussian,
    DwEnvelope,
    PermCycles,
    Lax,
    Cue,
    Poisson,
}

impl TheoryKind {
    pub fn name(self) -> &'static str {
        match self {
            TheoryKind::CbeGaussian => "cbe_gaussian",
            TheoryKind::DwEnvelope => "dw_envelope",
            TheoryKind::PermCycles => "perm_cycles",
            TheoryKind::Lax => "lax",
            TheoryKind::Cue => "cue",
            TheoryKind::Poisson => "poisson",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGrid {
    pub tau_step: f64,
    pub tau_max: f64,
}

/// How each sample's eigendecomposition is certified.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenCheck {
    /// Eigenvectors are computed and `max_n |U v_n - e^{iE_n} v_n|` is bounded.
    #[default]
    Residual,
    /// Eigenvalues only; `sum_n e^{ikE_n}` must reproduce `tr U^k` for `k = 1, 2`.
    Trace,
}

impl EnsembleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleSpec::Cbe { .. } => "cbe",
            EnsembleSpec::Perm { .. } => "perm",
            EnsembleSpec::PermLocal { .. } => "perm_local",
            EnsembleSpec::Lax { .. } => "lax",
        }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        match *self {
            EnsembleSpec::Cbe { d, .. } | EnsembleSpec::Perm { d, .. } | EnsembleSpec::Lax { d, .. } => d,
            EnsembleSpec::PermLocal { qubits, .. } => 1usize.checked_shl(qubits as u32).unwrap_or(0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(SffError::Parameter(format!("ensemble.{field}: {msg}")));
        match self {
            EnsembleSpec::Cbe { d, beta } => {
                if *d < 2 || d % 2 != 0 {
                    return bad("d", format!("must be even and >= 2, got {d} (odd d is not supported)"));
                }
                if !(*beta > 0.0) {
                    return bad("beta", format!("must be positive, got {beta}"));
                }
            }
            EnsembleSpec::Perm { d, g, permutation } => {
                if *d < 1 {
                    return bad("d", "must be >= 1".into());
                }
                if !(0.0..=std::f64::consts::FRAC_PI_2).contains(g) {
                    return bad("g", format!("must lie in [0, pi/2], got {g}"));
                }
                if let PermutationSpec::Cycles { lengths } = permutation {
                    let total: usize = lengths.iter().sum();
                    if total != *d || lengths.contains(&0) {
                        return bad(
                            "permutation.lengths",
                            format!("positive cycle lengths must sum to d = {d}, got {lengths:?}"),
                        );
                    }
                }
            }
            EnsembleSpec::PermLocal {
                qubits,
                block,
                g,
                permutation,
            } => {
                if *block < 2 {
                    return bad("block", format!("must be >= 2, got {block}"));
                }
                if block > qubits {
                    return bad("block", format!("block width {block} exceeds chain length {qubits}"));
                }
                if *qubits > 14 {
                    return bad("qubits", format!("dense construction limited to 14 qubits, got {qubits}"));
                }
                if !(*g >= 0.0) || !g.is_finite() {
                    return bad("g", format!("must be finite and >= 0, got {g}"));
                }
                if let StaircasePermutationSpec::Search { lengths, .. } = permutation {
                    let total: usize = lengths.iter().sum();
                    if total != 1 << qubits {
                        return bad(
                            "permutation.lengths",
                            format!("cycle lengths must sum to 2^qubits = {}, got {lengths:?}", 1 << qubits),
                        );
                    }
                }
            }
            EnsembleSpec::Lax { d, g, limit } => {
                if *d < 1 {
                    return bad("d", "must be >= 1".into());
                }
                match (g, limit) {
                    (Some(g), None) => {
                        if !(*g > 0.0 && *g < 1.0) {
                            return bad("g", format!("must lie strictly inside (0, 1), got {g}"));
                        }
                    }
                    (None, Some(_)) => {}
                    _ => return bad("g", "exactly one of `g` and `limit` must be set".into()),
                }
            }
        }
        if self.dim() > MAX_DIM {
            return bad("d", format!("dimension {} exceeds {MAX_DIM}", self.dim()));
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.ensemble.validate()?;
        if self.n_samples < 2 {
            return Err(SffError::param(format!("n_samples: must be >= 2, got {}", self.n_samples)));
        }
        if self.workers == Some(0) {
            return Err(SffError::param("workers: must be >= 1"));
        }
        if let Some(grid) = &self.theory_grid {
            if !(grid.tau_step > 0.0) || !(grid.tau_max >= grid.tau_step) {
                return Err(SffError::param(format!(
                    "theory_grid: need tau_step > 0 and tau_max >= tau_step, got {grid:?}"
                )));
            }
        }
        if let Some(c) = self.gaussian_c {
            if !(c > 0.0) {
                return Err(SffError::param(format!("gaussian_c: must be positive, got {c}")));
            }
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}
