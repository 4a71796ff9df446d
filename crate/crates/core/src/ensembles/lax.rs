//! Random Lax matrices
//! `U_mn = (1/d) e^{i p_m} (1 - e^{2 pi i g}) / (1 - e^{2 pi i (m - n + g)/d})`
//! with indices `m, n = 0 .. d-1`, plus the two limits as separate constructors.

use std::f64::consts::PI;

use faer::{c64, Mat};
use rand::Rng;

use crate::rng::uniform_phase;
use crate::unitary::{phased_permutation_matrix, UnitaryMatrix};
use crate::{Result, SffError};

/// Unitarity bound for the Lax construction, whose entries are ratios of
/// nearly cancelling exponentials at large `d`.
pub const LAX_UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LaxParams {
    pub g: f64,
    pub momenta: Vec<f64>,
}

impl LaxParams {
    pub fn new(g: f64, momenta: Vec<f64>) -> Result<Self> {
        if !(g > 0.0 && g < 1.0) {
            return Err(SffError::param(format!(
                "Lax coupling must lie strictly inside (0, 1), got {g}; use the limit constructors"
            )));
        }
        if momenta.is_empty() {
            return Err(SffError::param("Lax matrix needs d >= 1 momenta"));
        }
        Ok(Self { g, momenta })
    }

    pub fn dim(&self) -> usize {
        self.momenta.len()
    }
}

pub fn sample_momenta<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| uniform_phase(rng)).collect()
}

/// `sin(pi a / b)` for `0 <= a <= b`, reflected to the half where the argument is small.
fn sin_pi_ratio(a: f64, b: f64, b_minus_a: f64) -> f64 {
    if 2.0 * a <= b {
        (PI * a / b).sin()
    } else {
        (PI * b_minus_a / b).sin()
    }
}

pub fn build_lax_unitary(params: &LaxParams) -> Result<UnitaryMatrix> {
    let d = params.dim();
    let df = d as f64;
    let g = params.g;
    // 1 - e^{i x} = -2i sin(x/2) e^{i x/2}, so the ratio in each entry is
    // sin(pi g) / sin(pi (delta + g)/d) times a pure phase
    let sin_g = sin_pi_ratio(g, 1.0, 1.0 - g);
    // the denominator only depends on delta = m - n mod d
    let ratios: Vec<c64> = (0..d)
        .map(|delta| {
            let a = delta as f64 + g;
            let modulus = sin_g / (df * sin_pi_ratio(a, df, (d - delta) as f64 - g));
            modulus * c64::cis(PI * g - PI * a / df)
        })
        .collect();
    let rows: Vec<c64> = params.momenta.iter().map(|&p| c64::cis(p)).collect();
    let u = Mat::<c64>::from_fn(d, d, |m, n| rows[m] * ratios[(m + d - n) % d]);
    UnitaryMatrix::with_tolerance(u, LAX_UNITARITY_TOLERANCE)
}

/// `g -> 1`: `U_mn = e^{i p_m} delta_{m+1, n}` (indices mod d).
pub fn build_lax_cyclic_shift(momenta: &[f64]) -> Result<UnitaryMatrix> {
    let d = momenta.len();
    if d == 0 {
        return Err(SffError::param("Lax matrix needs d >= 1 momenta"));
    }
    // column n = m + 1 carries e^{i p_m} in row m, i.e. |n> -> e^{i p_{n-1}} |n-1>
    let mapping: Vec<usize> = (0..d).map(|n| (n + d - 1) % d).collect();
    let phases: Vec<f64> = (0..d).map(|n| momenta[(n + d - 1) % d]).collect();
    UnitaryMatrix::new(phased_permutation_matrix(&mapping, &phases))
}

/// `g -> 0`: `U = diag(e^{i p_m})`.
pub fn build_lax_diagonal(momenta: &[f64]) -> Result<UnitaryMatrix> {
    let d = momenta.len();
    if d == 0 {
        return Err(SffError::param("Lax matrix needs d >= 1 momenta"));
    }
    let mapping: Vec<usize> = (0..d).collect();
    UnitaryMatrix::new(phased_permutation_matrix(&mapping, momenta))
}
