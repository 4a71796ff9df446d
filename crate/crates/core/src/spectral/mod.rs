//! Eigenphases of sampled unitaries and the spectral form factor
//! `K(t) = <|tr U^t|^2>`.

mod eigenphases;
mod monte_carlo;
mod sff;

pub use eigenphases::{
    schur_eigenphases, unitary_eigenphases, unitary_eigenphases_checked, EigenMethod, EigenReport,
    EIGEN_RESIDUAL_TOLERANCE,
};
pub use monte_carlo::{monte_carlo_sff, monte_carlo_sff_with, sample_sff, MonteCarloOptions, SffCurve};
pub use sff::{sff_direct_trace, sff_from_phases, sff_relative_error, DIRECT_TRACE_MAX_DIM};

use std::f64::consts::{PI, TAU};

use faer::c64;

/// Maps an angle onto `(-pi, pi]`.
pub fn wrap_phase(angle: f64) -> f64 {
    let mut x = angle.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// Eigenphases `E_n` of one sample, in `(-pi, pi]` and ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseSet {
    phases: Vec<f64>,
}

impl EigenphaseSet {
    pub fn from_unsorted(mut phases: Vec<f64>) -> Self {
        for p in phases.iter_mut() {
            *p = wrap_phase(*p);
        }
        phases.sort_by(f64::total_cmp);
        Self { phases }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `sum_n e^{i k E_n}`, evaluated directly.
    pub fn power_trace(&self, k: i64) -> c64 {
        self.phases.iter().map(|&e| c64::cis(e * k as f64)).sum()
    }

    /// Gaps between neighbouring phases around the circle (including the
    /// wrap-around gap), in units of the mean spacing `2 pi / d`.
    pub fn nearest_spacings(&self) -> Vec<f64> {
        let d = self.phases.len();
        if d < 2 {
            return Vec::new();
        }
        let unit = TAU / d as f64;
        let mut gaps: Vec<f64> = self.phases.windows(2).map(|w| (w[1] - w[0]) / unit).collect();
        gaps.push((self.phases[0] + TAU - self.phases[d - 1]) / unit);
        gaps
    }
}
