//! Local version of the perturbed permutation circuit: depth-`n` staircase of
//! `n`-qubit gates `exp(-i g H_q) S_q` on a periodic chain of `L` qubits.
//!
//! Block `q = n m + k` acts on qubits `q, q+1, .., q+n-1 (mod L)` with local
//! index `sum_j 2^j b_{q+j}`. The circuit is the ordered product
//! `U = prod_{k=0}^{n-1} prod_{m} exp(-i g H_q) S_q`, leftmost factor first,
//! so the last block in that order acts first on a state.

use faer::{c64, Mat};
use rand::Rng;

use crate::permutation::Permutation;
use crate::rng::{derive_stream, sample_gue, sample_permutation, uniform_phase, SeedSpec};
use crate::unitary::{HermitianMatrix, UnitaryMatrix};
use crate::{Result, SffError};

pub const MAX_STAIRCASE_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaircaseLayout {
    pub qubits: usize,
    pub block: usize,
}

impl StaircaseLayout {
    pub fn new(qubits: usize, block: usize) -> Result<Self> {
        if block < 2 {
            return Err(SffError::param(format!("block width must be >= 2, got {block}")));
        }
        if block > qubits {
            return Err(SffError::param(format!(
                "block width {block} exceeds chain length {qubits}"
            )));
        }
        if qubits > MAX_STAIRCASE_QUBITS {
            return Err(SffError::Resource(format!(
                "{qubits} qubits exceed the dense limit of {MAX_STAIRCASE_QUBITS}"
            )));
        }
        Ok(Self { qubits, block })
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn block_dim(&self) -> usize {
        1 << self.block
    }

    /// First qubit of every block, in product order (leftmost factor first).
    pub fn block_starts(&self) -> Vec<usize> {
        let per_layer = self.qubits / self.block;
        (0..self.block)
            .flat_map(|k| (0..per_layer).map(move |m| self.block * m + k))
            .collect()
    }

    fn local_index(&self, start: usize, global: usize) -> usize {
        (0..self.block).fold(0, |acc, j| acc | (((global >> ((start + j) % self.qubits)) & 1) << j))
    }

    fn with_local(&self, start: usize, global: usize, local: usize) -> usize {
        (0..self.block).fold(global, |acc, j| {
            let bit = 1 << ((start + j) % self.qubits);
            if (local >> j) & 1 == 1 {
                acc | bit
            } else {
                acc & !bit
            }
        })
    }

    /// Global indices sharing all qubits outside the block, ordered by local index.
    fn orbit(&self, start: usize, global: usize) -> Vec<usize> {
        (0..self.block_dim()).map(|a| self.with_local(start, global, a)).collect()
    }
}

/// Fixed part of the model: layout, coupling and one local permutation per block.
#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseModel {
    pub layout: StaircaseLayout,
    pub g: f64,
    pub permutations: Vec<Permutation>,
}

/// All data of one circuit realization.
#[derive(Debug, Clone)]
pub struct LocalCircuitParams {
    pub layout: StaircaseLayout,
    pub g: f64,
    pub permutations: Vec<Permutation>,
    pub phases: Vec<Vec<f64>>,
    pub hamiltonians: Vec<HermitianMatrix>,
}

impl StaircaseModel {
    pub fn new(layout: StaircaseLayout, g: f64, permutations: Vec<Permutation>) -> Result<Self> {
        let blocks = layout.block_starts().len();
        if permutations.len() != blocks {
            return Err(SffError::param(format!(
                "{} local permutations for {blocks} blocks",
                permutations.len()
            )));
        }
        if permutations.iter().any(|p| p.dim() != layout.block_dim()) {
            return Err(SffError::param("local permutation size must be 2^block"));
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(SffError::param(format!("g must be finite and >= 0, got {g}")));
        }
        Ok(Self { layout, g, permutations })
    }

    /// Local permutations drawn uniformly, block by block, from `rng`.
    pub fn random<R: Rng + ?Sized>(layout: StaircaseLayout, g: f64, rng: &mut R) -> Result<Self> {
        let permutations = layout
            .block_starts()
            .iter()
            .map(|_| sample_permutation(rng, layout.block_dim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layout, g, permutations)
    }

    /// Redraws the local permutations from streams `(seed, 0), (seed, 1), ..`
    /// until the composed classical permutation has the requested cycle lengths.
    pub fn search(
        layout: StaircaseLayout,
        g: f64,
        cycle_lengths: &[usize],
        seed: u64,
        max_attempts: u64,
    ) -> Result<(Self, u64)> {
        let mut target = cycle_lengths.to_vec();
        target.sort_unstable_by(|a, b| b.cmp(a));
        if target.iter().sum::<usize>() != layout.dim() {
            return Err(SffError::param(format!(
                "cycle lengths {cycle_lengths:?} do not partition {}",
                layout.dim()
            )));
        }
        // for qubits > block every local permutation acts on at least two
        // copies of its block and is therefore even
        let odd = target.iter().map(|&n| n.saturating_sub(1)).sum::<usize>() % 2 == 1;
        if odd && layout.qubits > layout.block {
            return Err(SffError::param(format!(
                "cycle lengths {cycle_lengths:?} form an odd permutation, which a staircase of \
                 {}-qubit blocks on {} qubits cannot produce",
                layout.block, layout.qubits
            )));
        }
        for attempt in 0..max_attempts {
            let mut rng = derive_stream(SeedSpec::new(seed, attempt));
            let model = Self::random(layout, g, &mut rng)?;
            if model.composed_permutation().cycle_lengths() == target {
                return Ok((model, attempt));
            }
        }
        Err(SffError::Numerical(format!(
            "no staircase permutation with cycles {cycle_lengths:?} within {max_attempts} attempts"
        )))
    }

    /// The classical permutation `S_total` of the circuit at `g = 0` (phases dropped).
    pub fn composed_permutation(&self) -> Permutation {
        let layout = self.layout;
        let starts = layout.block_starts();
        let mapping = (0..layout.dim())
            .map(|mut x| {
                for (start, perm) in starts.iter().zip(&self.permutations).rev() {
                    let a = layout.local_index(*start, x);
                    x = layout.with_local(*start, x, perm.apply(a));
                }
                x
            })
            .collect();
        Permutation::from_mapping(mapping).expect("product of bijections")
    }

    /// Draws per-block phases then the per-block GUE matrix, in product order.
    pub fn sample_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LocalCircuitParams> {
        let bd = self.layout.block_dim();
        let mut phases = Vec::with_capacity(self.permutations.len());
        let mut hamiltonians = Vec::with_capacity(self.permutations.len());
        for _ in &self.permutations {
            phases.push((0..bd).map(|_| uniform_phase(rng)).collect());
            hamiltonians.push(sample_gue(rng, bd)?);
        }
        Ok(LocalCircuitParams {
            layout: self.layout,
            g: self.g,
            permutations: self.permutations.clone(),
            phases,
            hamiltonians,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<UnitaryMatrix> {
        build_local_staircase(&self.sample_params(rng)?)
    }
}

pub fn build_local_staircase(params: &LocalCircuitParams) -> Result<UnitaryMatrix> {
    let layout = params.layout;
    let starts = layout.block_starts();
    let blocks = starts.len();
    if params.permutations.len() != blocks || params.phases.len() != blocks || params.hamiltonians.len() != blocks {
        return Err(SffError::param(format!("staircase needs data for {blocks} blocks")));
    }
    let bd = layout.block_dim();
    let rotations = params
        .hamiltonians
        .iter()
        .map(|h| {
            if h.dim() != bd {
                return Err(SffError::param("local Hamiltonian size must be 2^block"));
            }
            if params.g == 0.0 {
                Ok(Mat::<c64>::identity(bd, bd))
            } else {
                h.exp_minus_i(params.g)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let dim = layout.dim();
    let mut u = Mat::<c64>::identity(dim, dim);
    let mut local_in = vec![c64::new(0.0, 0.0); bd];
    let mut local_out = vec![c64::new(0.0, 0.0); bd];
    // rightmost factor acts first
    for q in (0..blocks).rev() {
        let start = starts[q];
        let perm = &params.permutations[q];
        let phases: Vec<c64> = params.phases[q].iter().map(|&p| c64::cis(p)).collect();
        let rot = &rotations[q];
        for base in 0..dim {
            if layout.local_index(start, base) != 0 {
                continue;
            }
            let orbit = layout.orbit(start, base);
            for c in 0..dim {
                for (a, &idx) in orbit.iter().enumerate() {
                    local_in[perm.apply(a)] = phases[a] * u[(idx, c)];
                }
                for (r, out) in local_out.iter_mut().enumerate() {
                    *out = (0..bd).map(|s| rot[(r, s)] * local_in[s]).sum();
                }
                for (a, &idx) in orbit.iter().enumerate() {
                    u[(idx, c)] = local_out[a];
                }
            }
        }
    }
    UnitaryMatrix::new(u)
}
