//! Permutations of `{0, .., d-1}` together with their cycle structure.

use serde::{Deserialize, Serialize};

use crate::{Result, SffError};

/// A bijection `k -> pi(k)` on `{0, .., d-1}`.
///
/// The cycle decomposition is computed once at construction and kept sorted
/// by decreasing length (ties broken by smallest element).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    mapping: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Self::from_mapping((0..d).collect()).expect("identity is a bijection")
    }

    pub fn from_mapping(mapping: Vec<usize>) -> Result<Self> {
        let d = mapping.len();
        let mut seen = vec![false; d];
        for &image in &mapping {
            if image >= d || seen[image] {
                return Err(SffError::param(format!(
                    "mapping is not a bijection on 0..{d} (image {image})"
                )));
            }
            seen[image] = true;
        }
        let cycles = decompose(&mapping);
        Ok(Self { mapping, cycles })
    }

    /// Canonical permutation with the given cycle lengths: consecutive blocks
    /// of indices, each advanced by one within its block.
    pub fn from_cycle_lengths(lengths: &[usize]) -> Result<Self> {
        if lengths.iter().any(|&l| l == 0) {
            return Err(SffError::param("cycle lengths must be positive"));
        }
        let d: usize = lengths.iter().sum();
        let mut mapping = vec![0; d];
        let mut start = 0;
        for &len in lengths {
            for j in 0..len {
                mapping[start + j] = start + (j + 1) % len;
            }
            start += len;
        }
        Self::from_mapping(mapping)
    }

    /// Single cycle `k -> k + 1 mod d`.
    pub fn cyclic_shift(d: usize) -> Self {
        Self::from_mapping((0..d).map(|k| (k + 1) % d).collect()).expect("shift is a bijection")
    }

    pub fn dim(&self) -> usize {
        self.mapping.len()
    }

    pub fn apply(&self, k: usize) -> usize {
        self.mapping[k]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    /// `self` after `first`, i.e. `k -> self(first(k))`.
    pub fn compose_after(&self, first: &Permutation) -> Result<Self> {
        if self.dim() != first.dim() {
            return Err(SffError::param("composing permutations of different sizes"));
        }
        Self::from_mapping(first.mapping.iter().map(|&k| self.mapping[k]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.dim()];
        for (k, &image) in self.mapping.iter().enumerate() {
            inv[image] = k;
        }
        Self::from_mapping(inv).expect("inverse of a bijection")
    }
}

fn decompose(mapping: &[usize]) -> Vec<Vec<usize>> {
    let mut visited = vec![false; mapping.len()];
    let mut cycles = Vec::new();
    for start in 0..mapping.len() {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut k = start;
        while !visited[k] {
            visited[k] = true;
            cycle.push(k);
            k = mapping[k];
        }
        cycles.push(cycle);
    }
    // stable sort keeps the smallest-leading-element order among equal lengths
    cycles.sort_by(|a, b| b.len().cmp(&a.len()));
    cycles
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = SffError;

    fn try_from(mapping: Vec<usize>) -> Result<Self> {
        Self::from_mapping(mapping)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.mapping
    }
}
