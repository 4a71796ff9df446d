//! Qubit-circuit realizations of the random-walk unitary, used to cross-check
//! [`cmv_unitary`](super::cbe::cmv_unitary) at small sizes.
//!
//! Qubit convention: the computational basis index is `sum_k 2^k b_k`, and a
//! two-qubit gate on the ordered pair `(m, n)` is written in the local basis
//! `b_m + 2 b_n`.

use faer::{c64, Mat};

use super::cbe::CbeCoefficients;
use crate::unitary::{max_abs_diff, UnitaryMatrix};
use crate::{Result, SffError};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
const ONE: c64 = c64 { re: 1.0, im: 0.0 };

/// Largest `l` for the brickwork check (`2l` qubits, dense `4^l` matrix).
pub const MAX_BRICKWORK_SITES: usize = 5;

/// The walk on `N` qubits: cyclic incrementer plus two multiplexers.
#[derive(Debug, Clone)]
pub struct MultiplexerCircuit {
    pub qubits: usize,
    /// Full `2^N x 2^N` circuit unitary.
    pub full: Mat<c64>,
    /// Restriction to the first `d` basis states.
    pub restricted: UnitaryMatrix,
}

impl MultiplexerCircuit {
    /// Largest modulus of an entry coupling the first `d` states to the padding.
    pub fn leakage(&self) -> f64 {
        let d = self.restricted.dim();
        let dim = self.full.nrows();
        let mut worst = 0.0f64;
        for c in 0..dim {
            for r in 0..dim {
                if (r < d) != (c < d) {
                    worst = worst.max(self.full[(r, c)].norm());
                }
            }
        }
        worst
    }
}

/// Multiplexer applying `Theta_{2k + lambda}` to qubit 0 when the control
/// qubits `N-1 .. 1` encode `k`; blocks beyond `d - 1` are the identity.
fn multiplexer(coefficients: &CbeCoefficients, qubits: usize, lambda: usize) -> Mat<c64> {
    let dim = 1usize << qubits;
    let d = coefficients.dim();
    let mut m = Mat::<c64>::zeros(dim, dim);
    for k in 0..dim / 2 {
        let index = 2 * k + lambda;
        let block = if index < d {
            coefficients.block(index)
        } else {
            [[ONE, ZERO], [ZERO, ONE]]
        };
        for a in 0..2 {
            for b in 0..2 {
                m[(2 * k + a, 2 * k + b)] = block[a][b];
            }
        }
    }
    m
}

pub fn build_walk_multiplexer_unitary(coefficients: &CbeCoefficients) -> Result<MultiplexerCircuit> {
    let d = coefficients.dim();
    if d < 2 || d % 2 != 0 {
        return Err(SffError::Unsupported(format!("multiplexer walk needs even d, got {d}")));
    }
    let qubits = d.next_power_of_two().trailing_zeros() as usize;
    if qubits > 12 {
        return Err(SffError::Resource(format!("{qubits}-qubit dense circuit requested")));
    }
    let dim = 1usize << qubits;
    let mut adder = Mat::<c64>::zeros(dim, dim);
    for k in 0..dim {
        adder[((k + 1) % dim, k)] = ONE;
    }
    let m0 = multiplexer(coefficients, qubits, 0);
    let m1 = multiplexer(coefficients, qubits, 1);
    let full = &(&(&adder * &m1) * adder.adjoint()) * &m0;
    let restricted = Mat::<c64>::from_fn(d, d, |r, c| full[(r, c)]);
    Ok(MultiplexerCircuit {
        qubits,
        restricted: UnitaryMatrix::new(restricted)?,
        full,
    })
}

/// Two-qubit gate `CNOT(n->m) Theta(m->n) CNOT(n->m)`: identity on
/// `|00>`, `|11>` and `Theta` on the one-particle pair (particle on `m`,
/// particle on `n`).
pub fn particle_conserving_gate(block: [[c64; 2]; 2]) -> [[c64; 4]; 4] {
    [
        [ONE, ZERO, ZERO, ZERO],
        [ZERO, block[0][0], block[0][1], ZERO],
        [ZERO, block[1][0], block[1][1], ZERO],
        [ZERO, ZERO, ZERO, ONE],
    ]
}

fn apply_two_qubit(state: &mut [c64], m: usize, n: usize, gate: &[[c64; 4]; 4]) {
    let (bm, bn) = (1usize << m, 1usize << n);
    for base in 0..state.len() {
        if base & (bm | bn) != 0 {
            continue;
        }
        let idx = [base, base | bm, base | bn, base | bm | bn];
        let v = idx.map(|i| state[i]);
        for (row, &i) in idx.iter().enumerate() {
            state[i] = (0..4).map(|col| gate[row][col] * v[col]).sum();
        }
    }
}

/// Two-layer brickwork on `2l` qubits (qubit `2l` identified with `0`).
#[derive(Debug, Clone)]
pub struct Brickwork {
    pub qubits: usize,
    /// Full `2^{2l}`-dimensional circuit unitary.
    pub full: Mat<c64>,
}

impl Brickwork {
    /// Restriction to `Q = 1`: entry `(i, j)` couples "particle on qubit i" to
    /// "particle on qubit j".
    pub fn one_particle_sector(&self) -> Result<UnitaryMatrix> {
        let q = self.qubits;
        UnitaryMatrix::new(Mat::<c64>::from_fn(q, q, |i, j| self.full[(1 << i, 1 << j)]))
    }

    /// Largest entry connecting different particle-number sectors.
    pub fn number_violation(&self) -> f64 {
        let dim = self.full.nrows();
        let mut worst = 0.0f64;
        for c in 0..dim {
            for r in 0..dim {
                if r.count_ones() != c.count_ones() {
                    worst = worst.max(self.full[(r, c)].norm());
                }
            }
        }
        worst
    }
}

pub fn build_brickwork(coefficients: &CbeCoefficients) -> Result<Brickwork> {
    let d = coefficients.dim();
    if d < 2 || d % 2 != 0 {
        return Err(SffError::Unsupported(format!("brickwork needs even d, got {d}")));
    }
    let l = d / 2;
    if l > MAX_BRICKWORK_SITES {
        return Err(SffError::Resource(format!(
            "brickwork on {d} qubits exceeds the {}-qubit limit",
            2 * MAX_BRICKWORK_SITES
        )));
    }
    let dim = 1usize << d;
    let even: Vec<_> = (0..l).map(|k| particle_conserving_gate(coefficients.block(2 * k))).collect();
    let odd: Vec<_> = (0..l).map(|k| particle_conserving_gate(coefficients.block(2 * k + 1))).collect();
    let mut full = Mat::<c64>::zeros(dim, dim);
    let mut state = vec![ZERO; dim];
    for c in 0..dim {
        state.iter_mut().for_each(|z| *z = ZERO);
        state[c] = ONE;
        for (k, gate) in even.iter().enumerate() {
            apply_two_qubit(&mut state, 2 * k, 2 * k + 1, gate);
        }
        for (k, gate) in odd.iter().enumerate() {
            apply_two_qubit(&mut state, 2 * k + 1, (2 * k + 2) % d, gate);
        }
        for (r, z) in state.iter().enumerate() {
            full[(r, c)] = *z;
        }
    }
    Ok(Brickwork { qubits: d, full })
}

/// One-particle sector of the brickwork as a `d x d` unitary.
pub fn build_brickwork_one_particle(coefficients: &CbeCoefficients) -> Result<UnitaryMatrix> {
    build_brickwork(coefficients)?.one_particle_sector()
}

/// Entrywise distance between two constructions of the same walk.
pub fn construction_mismatch(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
    max_abs_diff(a.as_mat(), b.as_mat())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_preserves_vacuum_and_pair() {
        let block = CbeCoefficients::crystal(4, 0.3).block(0);
        let gate = particle_conserving_gate(block);
        let mut s = vec![ZERO; 4];
        s[0] = ONE;
        apply_two_qubit(&mut s, 0, 1, &gate);
        assert_eq!(s[0], ONE);
        let mut s = vec![ZERO; 4];
        s[3] = ONE;
        apply_two_qubit(&mut s, 0, 1, &gate);
        assert_eq!(s[3], ONE);
    }

    #[test]
    fn size_limits() {
        assert!(matches!(
            build_brickwork(&CbeCoefficients::crystal(12, 0.0)),
            Err(SffError::Resource(_))
        ));
    }
}
