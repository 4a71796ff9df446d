//! Eigenphases through the Cayley transform.
//!
//! For `W = e^{i theta} U` the matrix `K = i (I - W)(I + W)^{-1}` is Hermitian
//! with eigenvalues `tan((E_n + theta) / 2)`, so a Hermitian eigensolver
//! recovers `E_n = 2 atan(lambda_n) - theta`. The shift `theta` keeps `-1`
//! out of the spectrum of `W`; when `K` comes out too large the shift is
//! moved and, as a last resort, the general Schur-based solver is used.

use std::f64::consts::PI;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef, Side};

use super::{wrap_phase, EigenphaseSet};
use crate::config::EigenCheck;
use crate::unitary::UnitaryMatrix;
use crate::{Result, SffError};

/// Bound on `max_n |U v_n - e^{iE_n} v_n|` (or the trace mismatch per unit dimension).
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-8;

const INITIAL_SHIFT: f64 = 0.3;
const MAX_SHIFTS: usize = 8;
/// Largest `|lambda|` accepted from the Cayley transform.
const CAYLEY_LIMIT: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Cayley,
    Schur,
}

/// Diagnostics of one certified eigendecomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenReport {
    pub method: EigenMethod,
    pub check: EigenCheck,
    /// Residual (or trace mismatch) that was certified.
    pub residual: f64,
    pub shift: f64,
}

/// Eigenphases with the default eigenvector residual check.
pub fn unitary_eigenphases(u: &UnitaryMatrix) -> Result<EigenphaseSet> {
    unitary_eigenphases_checked(u, EigenCheck::Residual).map(|(set, _)| set)
}

pub fn unitary_eigenphases_checked(u: &UnitaryMatrix, check: EigenCheck) -> Result<(EigenphaseSet, EigenReport)> {
    let d = u.dim();
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut last_problem = String::new();
    for attempt in 0..MAX_SHIFTS {
        let shift = wrap_phase(INITIAL_SHIFT + attempt as f64 * golden * 2.0 * PI / d as f64);
        match cayley(u.as_mat(), shift, check) {
            Ok((phases, residual)) if residual <= EIGEN_RESIDUAL_TOLERANCE * scale(check, d) => {
                let report = EigenReport {
                    method: EigenMethod::Cayley,
                    check,
                    residual,
                    shift,
                };
                return Ok((EigenphaseSet::from_unsorted(phases), report));
            }
            Ok((_, residual)) => last_problem = format!("residual {residual:.3e} at shift {shift:.4}"),
            Err(problem) => last_problem = problem,
        }
    }
    let (phases, residual) = schur(u.as_mat(), check)?;
    if residual <= EIGEN_RESIDUAL_TOLERANCE * scale(check, d) {
        return Ok((
            EigenphaseSet::from_unsorted(phases),
            EigenReport {
                method: EigenMethod::Schur,
                check,
                residual,
                shift: 0.0,
            },
        ));
    }
    Err(SffError::Numerical(format!(
        "eigenphases not certified (d = {d}, unitarity error {:.3e}): Cayley: {last_problem}; Schur residual {residual:.3e}",
        u.unitarity_error()
    )))
}

/// Eigenphases from the general (Schur-based) eigensolver, eigenvalues only.
/// Independent of the Cayley route and used as its oracle.
pub fn schur_eigenphases(u: &UnitaryMatrix) -> Result<EigenphaseSet> {
    let values = u
        .as_mat()
        .eigenvalues()
        .map_err(|e| SffError::Numerical(format!("general eigensolver: {e:?}")))?;
    Ok(EigenphaseSet::from_unsorted(values.iter().map(|z| z.im.atan2(z.re)).collect()))
}

fn scale(check: EigenCheck, d: usize) -> f64 {
    match check {
        EigenCheck::Residual => 1.0,
        EigenCheck::Trace => d as f64,
    }
}

fn cayley(u: MatRef<'_, c64>, shift: f64, check: EigenCheck) -> std::result::Result<(Vec<f64>, f64), String> {
    let d = u.nrows();
    let z = c64::cis(shift);
    let one = c64::new(1.0, 0.0);
    let plus = Mat::<c64>::from_fn(d, d, |i, j| if i == j { one + z * u[(i, j)] } else { z * u[(i, j)] });
    let minus = Mat::<c64>::from_fn(d, d, |i, j| if i == j { one - z * u[(i, j)] } else { -(z * u[(i, j)]) });
    // (I + W) and (I - W) commute, so the left solve gives the same K
    let x = plus.partial_piv_lu().solve(&minus);
    let i_unit = c64::new(0.0, 1.0);
    let k = Mat::<c64>::from_fn(d, d, |r, c| (i_unit * x[(r, c)] + (i_unit * x[(c, r)]).conj()) * 0.5);
    if !k.as_ref().is_all_finite() {
        return Err(format!("singular Cayley transform at shift {shift:.4}"));
    }
    let to_phase = |lambda: f64| wrap_phase(2.0 * lambda.atan() - shift);
    match check {
        EigenCheck::Residual => {
            let evd = k
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| format!("Hermitian eigensolver: {e:?}"))?;
            let lambdas: Vec<f64> = evd.S().column_vector().iter().map(|l| l.re).collect();
            if lambdas.iter().any(|l| l.abs() > CAYLEY_LIMIT) {
                return Err(format!("Cayley spectrum too wide at shift {shift:.4}"));
            }
            let phases: Vec<f64> = lambdas.iter().map(|&l| to_phase(l)).collect();
            let residual = residual(u, evd.U(), &phases);
            Ok((phases, residual))
        }
        EigenCheck::Trace => {
            let lambdas = k
                .self_adjoint_eigenvalues(Side::Lower)
                .map_err(|e| format!("Hermitian eigensolver: {e:?}"))?;
            if lambdas.iter().any(|l| l.abs() > CAYLEY_LIMIT) {
                return Err(format!("Cayley spectrum too wide at shift {shift:.4}"));
            }
            let phases: Vec<f64> = lambdas.iter().map(|&l| to_phase(l)).collect();
            let mismatch = trace_mismatch(u, &phases);
            Ok((phases, mismatch))
        }
    }
}

fn schur(u: MatRef<'_, c64>, check: EigenCheck) -> Result<(Vec<f64>, f64)> {
    let err = |e| SffError::Numerical(format!("general eigensolver: {e:?}"));
    match check {
        EigenCheck::Residual => {
            let evd = u.eigen().map_err(err)?;
            let phases: Vec<f64> = evd.S().column_vector().iter().map(|z| z.im.atan2(z.re)).collect();
            let residual = residual(u, evd.U(), &phases);
            Ok((phases, residual))
        }
        EigenCheck::Trace => {
            let values = u.eigenvalues().map_err(err)?;
            let phases: Vec<f64> = values.iter().map(|z| z.im.atan2(z.re)).collect();
            let mismatch = trace_mismatch(u, &phases);
            Ok((phases, mismatch))
        }
    }
}

/// `max_n |U v_n - e^{iE_n} v_n| / |v_n|`.
fn residual(u: MatRef<'_, c64>, v: MatRef<'_, c64>, phases: &[f64]) -> f64 {
    let uv = u * v;
    let mut worst = 0.0f64;
    for (n, &e) in phases.iter().enumerate() {
        let w = c64::cis(e);
        let mut diff = 0.0;
        let mut norm = 0.0;
        for r in 0..u.nrows() {
            diff += (uv[(r, n)] - w * v[(r, n)]).norm_sqr();
            norm += v[(r, n)].norm_sqr();
        }
        let r = (diff / norm).sqrt();
        if r.is_nan() {
            return f64::INFINITY;
        }
        worst = worst.max(r);
    }
    worst
}

/// `max_{k=1,2} |sum_n e^{ikE_n} - tr U^k|`.
fn trace_mismatch(u: MatRef<'_, c64>, phases: &[f64]) -> f64 {
    let d = u.nrows();
    let tr1: c64 = (0..d).map(|i| u[(i, i)]).sum();
    let mut tr2 = c64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            tr2 += u[(i, j)] * u[(j, i)];
        }
    }
    let s1: c64 = phases.iter().map(|&e| c64::cis(e)).sum();
    let s2: c64 = phases.iter().map(|&e| c64::cis(2.0 * e)).sum();
    let m = (s1 - tr1).norm().max((s2 - tr2).norm());
    if m.is_nan() {
        f64::INFINITY
    } else {
        m
    }
}
