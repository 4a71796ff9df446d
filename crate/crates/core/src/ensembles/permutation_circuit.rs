//! Permutation circuit perturbed by a global GUE rotation, `U = exp(-igH) S`.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::permutation::Permutation;
use crate::rng::{sample_gue, uniform_phase};
use crate::unitary::{phased_permutation_matrix, HermitianMatrix, UnitaryMatrix};
use crate::{Result, SffError};

/// `S|k> = e^{i phi_k} |pi(k)>` together with the coupling `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermCircuitParams {
    pub g: f64,
    pub permutation: Permutation,
    pub phases: Vec<f64>,
}

impl PermCircuitParams {
    pub fn new(g: f64, permutation: Permutation, phases: Vec<f64>) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&g) {
            return Err(SffError::param(format!("g must lie in [0, pi/2], got {g}")));
        }
        if phases.len() != permutation.dim() {
            return Err(SffError::param(format!(
                "{} phases for a permutation of {} elements",
                phases.len(),
                permutation.dim()
            )));
        }
        Ok(Self { g, permutation, phases })
    }

    pub fn dim(&self) -> usize {
        self.permutation.dim()
    }
}

pub fn build_perturbed_permutation(params: &PermCircuitParams, gue: &HermitianMatrix) -> Result<UnitaryMatrix> {
    let d = params.dim();
    if gue.dim() != d {
        return Err(SffError::param(format!(
            "GUE matrix of size {} does not match permutation of size {d}",
            gue.dim()
        )));
    }
    let s = phased_permutation_matrix(params.permutation.mapping(), &params.phases);
    if params.g == 0.0 {
        return UnitaryMatrix::new(s);
    }
    let rotation = gue.exp_minus_i(params.g)?;
    UnitaryMatrix::new(&rotation * &s)
}

/// One sample: `d` phases, then the GUE matrix, from the same stream.
pub fn sample_perturbed_permutation<R: Rng + ?Sized>(
    g: f64,
    permutation: &Permutation,
    rng: &mut R,
) -> Result<UnitaryMatrix> {
    let d = permutation.dim();
    let phases: Vec<f64> = (0..d).map(|_| uniform_phase(rng)).collect();
    let params = PermCircuitParams::new(g, permutation.clone(), phases)?;
    let gue = sample_gue(rng, d)?;
    build_perturbed_permutation(&params, &gue)
}
