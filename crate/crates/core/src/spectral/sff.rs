use faer::{c64, Mat};

use super::EigenphaseSet;
use crate::unitary::UnitaryMatrix;
use crate::{Result, SffError};

/// Largest dimension accepted by the repeated-multiplication oracle.
pub const DIRECT_TRACE_MAX_DIM: usize = 128;

/// The rotating phase factors are recomputed exactly every this many steps.
const RESYNC_INTERVAL: usize = 1024;

/// `K(t) = |sum_n e^{i E_n t}|^2` for `t = 0..=t_max`, by incremental rotation.
pub fn sff_from_phases(phases: &EigenphaseSet, t_max: usize) -> Vec<f64> {
    let steps: Vec<c64> = phases.phases().iter().map(|&e| c64::cis(e)).collect();
    let mut current = vec![c64::new(1.0, 0.0); steps.len()];
    let mut k = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            if t % RESYNC_INTERVAL == 0 {
                for (z, &e) in current.iter_mut().zip(phases.phases()) {
                    *z = c64::cis(e * t as f64);
                }
            } else {
                for (z, s) in current.iter_mut().zip(&steps) {
                    *z *= *s;
                }
            }
        }
        let tr: c64 = current.iter().sum();
        k.push(tr.norm_sqr());
    }
    k
}

/// `|tr U^t|^2` by repeated matrix multiplication; oracle only.
pub fn sff_direct_trace(u: &UnitaryMatrix, t_max: usize) -> Result<Vec<f64>> {
    let d = u.dim();
    if d > DIRECT_TRACE_MAX_DIM {
        return Err(SffError::param(format!(
            "direct trace oracle is limited to d <= {DIRECT_TRACE_MAX_DIM}, got {d}"
        )));
    }
    let mut power = Mat::<c64>::identity(d, d);
    let mut k = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            power = &power * u.as_mat();
        }
        let tr: c64 = (0..d).map(|i| power[(i, i)]).sum();
        k.push(tr.norm_sqr());
    }
    Ok(k)
}

/// `max_t |a(t) - b(t)| / max(b(t), d)`.
///
/// Normalizing by `max(K, d)` keeps the metric meaningful in the dips,
/// where `K` itself can be arbitrarily close to zero.
pub fn sff_relative_error(a: &[f64], b: &[f64], d: usize) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.max(d as f64))
        .fold(0.0, f64::max)
}
