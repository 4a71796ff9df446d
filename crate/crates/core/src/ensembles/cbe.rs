//! Random-walk unitary `U = S L S† M` whose eigenphases follow the circular
//! beta-ensemble.
//!
//! Basis: `|n>|->` is index `2n`, `|n>|+>` is index `2n + 1`, so the
//! conditional shift `S` is the cyclic increment `k -> k + 1 mod d`.
//! `M` holds the blocks `Theta_0, Theta_2, ..` on the pairs `(2n, 2n+1)`;
//! `L` holds `Theta_1, Theta_3, ..` on the same pairs, and conjugation by `S`
//! moves them onto `(2n+1, 2n+2 mod d)`.

use faer::{c64, Mat};
use rand::Rng;

use crate::rng::{sample_alpha, uniform_phase, VerblunskyCoefficient};
use crate::unitary::UnitaryMatrix;
use crate::{Result, SffError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CbeParams {
    /// Dimension `d = 2l`.
    pub d: usize,
    /// Inverse temperature; `f64::INFINITY` selects the perfect crystal.
    pub beta: f64,
}

impl CbeParams {
    pub fn new(d: usize, beta: f64) -> Result<Self> {
        if d % 2 != 0 {
            return Err(SffError::Unsupported(format!(
                "random-walk construction is only provided for even d, got {d}"
            )));
        }
        if d < 2 {
            return Err(SffError::param(format!("d must be >= 2, got {d}")));
        }
        if !(beta > 0.0) {
            return Err(SffError::param(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { d, beta })
    }

    /// Exponent `s = beta (d - 1 - n) / 2` of the law of `alpha_n`.
    pub fn alpha_exponent(&self, n: usize) -> f64 {
        self.beta * (self.d - 1 - n) as f64 / 2.0
    }
}

/// The random data of one sample: `alpha_0 .. alpha_{d-2}` and the phase of
/// the final diagonal block `Theta_{d-1} = diag(e^{i phi}, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CbeCoefficients {
    pub alphas: Vec<VerblunskyCoefficient>,
    pub last_phase: f64,
}

impl CbeCoefficients {
    pub fn dim(&self) -> usize {
        self.alphas.len() + 1
    }

    /// Block `Theta_n`, row major in the `(|->, |+>)` basis.
    pub fn block(&self, n: usize) -> [[c64; 2]; 2] {
        let zero = c64::new(0.0, 0.0);
        if n == self.alphas.len() {
            [[c64::cis(self.last_phase), zero], [zero, c64::new(1.0, 0.0)]]
        } else {
            self.alphas[n].block()
        }
    }

    /// All `alpha_n = 0`: every scattering block becomes `sigma_x`.
    pub fn crystal(d: usize, last_phase: f64) -> Self {
        Self {
            alphas: (0..d - 1).map(VerblunskyCoefficient::zero).collect(),
            last_phase,
        }
    }
}

/// Draws `alpha_n` in order `n = 0, .., d-2`, then the last phase.
pub fn sample_cbe_coefficients<R: Rng + ?Sized>(params: CbeParams, rng: &mut R) -> Result<CbeCoefficients> {
    let d = params.d;
    let alphas = if params.beta.is_infinite() {
        (0..d - 1).map(VerblunskyCoefficient::zero).collect()
    } else {
        (0..d - 1)
            .map(|n| sample_alpha(rng, n, params.alpha_exponent(n)))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(CbeCoefficients {
        alphas,
        last_phase: uniform_phase(rng),
    })
}

/// Applies the 2x2 `block` to components `(p, q)` of `v`.
#[inline]
fn apply_pair(v: &mut [c64], p: usize, q: usize, block: &[[c64; 2]; 2]) {
    let (a, b) = (v[p], v[q]);
    v[p] = block[0][0] * a + block[0][1] * b;
    v[q] = block[1][0] * a + block[1][1] * b;
}

/// Assembles `S L S† M` column by column from the coefficients.
pub fn cmv_unitary(coefficients: &CbeCoefficients) -> Result<UnitaryMatrix> {
    let d = coefficients.dim();
    if d < 2 || d % 2 != 0 {
        return Err(SffError::Unsupported(format!("coefficient set implies odd or tiny d = {d}")));
    }
    let l = d / 2;
    let even: Vec<_> = (0..l).map(|n| coefficients.block(2 * n)).collect();
    let odd: Vec<_> = (0..l).map(|n| coefficients.block(2 * n + 1)).collect();
    let mut u = Mat::<c64>::zeros(d, d);
    let mut col = vec![c64::new(0.0, 0.0); d];
    for c in 0..d {
        col.iter_mut().for_each(|z| *z = c64::new(0.0, 0.0));
        col[c] = c64::new(1.0, 0.0);
        let n = c / 2;
        apply_pair(&mut col, 2 * n, 2 * n + 1, &even[n]);
        // S L S†: block Theta_{2m+1} on (2m+1, 2m+2 mod d); only the blocks
        // touching the two nonzero rows matter
        let previous = n.checked_sub(1).unwrap_or(l - 1);
        apply_pair(&mut col, 2 * n + 1, (2 * n + 2) % d, &odd[n]);
        if previous != n {
            apply_pair(&mut col, 2 * previous + 1, (2 * previous + 2) % d, &odd[previous]);
        }
        for (r, z) in col.iter().enumerate() {
            u[(r, c)] = *z;
        }
    }
    UnitaryMatrix::new(u)
}

pub fn build_cbe_unitary<R: Rng + ?Sized>(params: CbeParams, rng: &mut R) -> Result<UnitaryMatrix> {
    let coefficients = sample_cbe_coefficients(params, rng)?;
    cmv_unitary(&coefficients)
}
