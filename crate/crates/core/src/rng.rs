//! Deterministic per-sample random streams and the scalar distributions the
//! ensemble builders draw from.
//!
//! Every sample of an experiment owns the stream derived from
//! `(master_seed, sample_index)`: the ChaCha12 key is expanded from the
//! master seed and the sample index selects the 64-bit ChaCha stream (nonce).
//! Distinct indices therefore read disjoint keystreams, and the output only
//! depends on the pair, never on scheduling or worker count.

use std::f64::consts::PI;

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::permutation::Permutation;
use crate::unitary::HermitianMatrix;
use crate::{Result, SffError};

/// Random stream owned by one sample.
pub type Stream = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub sample_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        Self {
            master_seed,
            sample_index,
        }
    }
}

pub fn derive_stream(seed: SeedSpec) -> Stream {
    let mut rng = ChaCha12Rng::seed_from_u64(seed.master_seed);
    rng.set_stream(seed.sample_index);
    rng
}

/// Uniform angle in `(-pi, pi]`.
pub fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // random::<f64>() is in [0, 1)
    PI - 2.0 * PI * rng.random::<f64>()
}

/// Uniform draw in `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Verblunsky coefficient `alpha_n = e^{i phi} cos(theta)` of one scattering block.
///
/// `rho = sin(theta) = sqrt(1 - |alpha|^2)` is kept alongside `alpha` so the
/// block stays unitary to rounding even when `|alpha|` is close to one.
/// The strict bound `|alpha| < 1` is carried by `rho > 0`: for very small
/// exponents `|alpha|` can round to exactly one while `rho` stays positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerblunskyCoefficient {
    pub index: usize,
    pub alpha: c64,
    pub rho: f64,
}

impl VerblunskyCoefficient {
    pub fn zero(index: usize) -> Self {
        Self {
            index,
            alpha: c64::new(0.0, 0.0),
            rho: 1.0,
        }
    }

    /// The 2x2 scattering block `[[conj(a), rho], [rho, -a]]`, row major.
    pub fn block(&self) -> [[c64; 2]; 2] {
        let rho = c64::new(self.rho, 0.0);
        [[self.alpha.conj(), rho], [rho, -self.alpha]]
    }
}

/// Draws `alpha` with density `(1 - |alpha|^2)^(s - 1)` on the unit disk.
///
/// `|alpha|^2 = 1 - u^(1/s)` for `u ~ U(0, 1]` inverts the Beta(1, s) law of
/// `|alpha|^2`; the phase is uniform in `(-pi, pi]`.
pub fn sample_alpha<R: Rng + ?Sized>(
    rng: &mut R,
    index: usize,
    s_exponent: f64,
) -> Result<VerblunskyCoefficient> {
    if !(s_exponent > 0.0) || !s_exponent.is_finite() {
        return Err(SffError::param(format!(
            "Verblunsky exponent must be positive and finite, got {s_exponent}"
        )));
    }
    let u = open_unit(rng);
    let rho_sq = u.powf(1.0 / s_exponent);
    let modulus = (1.0 - rho_sq).max(0.0).sqrt();
    let phase = uniform_phase(rng);
    Ok(VerblunskyCoefficient {
        index,
        alpha: c64::from_polar(modulus, phase),
        rho: rho_sq.sqrt(),
    })
}

/// GUE matrix with density `exp(-(d/2) tr H^2)`.
///
/// Diagonal entries are `N(0, 1/d)`; real and imaginary parts of the upper
/// triangle are `N(0, 1/(2d))`. Entries are drawn row by row over the upper
/// triangle, diagonal first within each row.
pub fn sample_gue<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<HermitianMatrix> {
    if d < 1 {
        return Err(SffError::param("GUE dimension must be at least 1"));
    }
    let diag_sd = (1.0 / d as f64).sqrt();
    let off_sd = (0.5 / d as f64).sqrt();
    let mut h = Mat::<c64>::zeros(d, d);
    for i in 0..d {
        let x: f64 = StandardNormal.sample(rng);
        h[(i, i)] = c64::new(diag_sd * x, 0.0);
        for j in i + 1..d {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let z = c64::new(off_sd * re, off_sd * im);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    Ok(HermitianMatrix::from_trusted(h))
}

/// Uniformly random permutation (Fisher-Yates).
pub fn sample_permutation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Permutation> {
    if d < 1 {
        return Err(SffError::param("permutation size must be at least 1"));
    }
    let mut mapping: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..=i);
        mapping.swap(i, j);
    }
    Permutation::from_mapping(mapping)
}

/// Uniformly random permutation consisting of a single `d`-cycle (Sattolo).
pub fn sample_cyclic_permutation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Permutation> {
    if d < 1 {
        return Err(SffError::param("permutation size must be at least 1"));
    }
    let mut mapping: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        let j = rng.random_range(0..i);
        mapping.swap(i, j);
    }
    Permutation::from_mapping(mapping)
}

/// Zero-mean von Mises angle with concentration `kappa` (Best-Fisher).
pub fn sample_von_mises<R: Rng + ?Sized>(rng: &mut R, kappa: f64) -> f64 {
    if kappa < 1e-8 {
        return uniform_phase(rng);
    }
    if kappa > 1e6 {
        // the wrapped normal limit; Best-Fisher loses precision here
        let z: f64 = StandardNormal.sample(rng);
        return z / kappa.sqrt();
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = open_unit(rng);
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let angle = f.clamp(-1.0, 1.0).acos();
            return if u3 < 0.5 { -angle } else { angle };
        }
    }
}
