//! Closed-form predictions for the form factor: the Gaussian approximation
//! for the circular beta-ensemble, its Debye-Waller envelope, the perturbed
//! permutation model, the hard-rod (Lax) gas and the CUE/Poisson references.

use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::config::TheoryKind;
use crate::ensembles::Ensemble;
use crate::{Result, SffError};

/// The constant `C ≈ 3.6` of the Gaussian approximation.
pub const GAUSSIAN_C: f64 = 3.6;

/// Debye-Waller branches are switched at these values of `4 tau^2 / beta`.
pub const DW_SMALL_LIMIT: f64 = 0.1;
pub const DW_LARGE_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryCurve {
    pub kind: TheoryKind,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-point annotation (regime or validity), empty when not applicable.
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSff {
    pub value: f64,
    /// `|Im K| / max(|Re K|, d)` before the imaginary part is dropped.
    pub imag_residue: f64,
    /// False once `t / d > beta`, where the approximation is no longer trusted.
    pub valid: bool,
}

/// Gaussian-approximation form factor of the circular beta-ensemble,
/// `K(t) = d + d sum_{k=1}^{d-1} e^{2 pi i k t/d} |C d sin(pi k/d)|^{-4t^2/(beta d^2)}`.
pub fn cbe_gaussian_sff(d: usize, beta: f64, t: f64) -> GaussianSff {
    cbe_gaussian_sff_with_c(d, beta, t, GAUSSIAN_C)
}

pub fn cbe_gaussian_sff_with_c(d: usize, beta: f64, t: f64, c: f64) -> GaussianSff {
    let df = d as f64;
    let x = 4.0 * t * t / (beta * df * df);
    let integer_t = t.fract() == 0.0 && t.abs() < 1e15;
    let mut sum = c64::new(0.0, 0.0);
    for k in 1..d {
        // reduce k t mod d before forming the angle
        let turns = if integer_t {
            ((k as u128 * t.abs() as u128) % d as u128) as f64 / df * t.signum()
        } else {
            (k as f64 * t).rem_euclid(df) / df
        };
        let weight = if x == 0.0 {
            1.0
        } else {
            (c * df * (PI * k as f64 / df).sin()).abs().powf(-x)
        };
        sum += c64::cis(2.0 * PI * turns) * weight;
    }
    let value = df + df * sum.re;
    GaussianSff {
        value,
        imag_residue: (df * sum.im).abs() / value.abs().max(df),
        valid: !(t / df > beta),
    }
}

/// Normalized peak height of the Gaussian approximation at `t = tau d`,
/// `(K - d)/(d^2 - d) = (1/(d-1)) sum_k |C d sin(pi k/d)|^{-4 tau^2/beta}`.
pub fn gaussian_peak_height(d: usize, beta: f64, tau: f64, c: f64) -> f64 {
    let df = d as f64;
    let x = 4.0 * tau * tau / beta;
    if x == 0.0 {
        return 1.0;
    }
    (1..d)
        .map(|k| (c * df * (PI * k as f64 / df).sin()).abs().powf(-x))
        .sum::<f64>()
        / (df - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwRegime {
    Small,
    Crossover,
    Large,
}

impl DwRegime {
    pub fn name(self) -> &'static str {
        match self {
            DwRegime::Small => "small",
            DwRegime::Crossover => "crossover",
            DwRegime::Large => "large",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebyeWallerResult {
    pub tau: f64,
    pub regime: DwRegime,
    /// `e^{-2W}`.
    pub value: f64,
    pub w: f64,
}

pub fn debye_waller(d: usize, beta: f64, tau: f64) -> DebyeWallerResult {
    debye_waller_with_c(d, beta, tau, GAUSSIAN_C)
}

/// Debye-Waller factor of the Bragg peak at `t = tau d`:
/// `d^{-x}` for `x = 4 tau^2/beta < 0.1`, `(beta/(tau^2 d)) (C pi)^{-x}` for
/// `x > 10`, and the Gaussian-approximation peak sum in between (where the
/// asymptotic form is only `~ log(d)/d`).
pub fn debye_waller_with_c(d: usize, beta: f64, tau: f64, c: f64) -> DebyeWallerResult {
    let df = d as f64;
    let x = 4.0 * tau * tau / beta;
    let (regime, value) = if x < DW_SMALL_LIMIT {
        (DwRegime::Small, df.powf(-x))
    } else if x > DW_LARGE_LIMIT {
        (DwRegime::Large, beta / (tau * tau * df) * (c * PI).powf(-x))
    } else {
        (DwRegime::Crossover, gaussian_peak_height(d, beta, tau, c))
    };
    DebyeWallerResult {
        tau,
        regime,
        value,
        w: -0.5 * value.ln(),
    }
}

/// Order `gamma = 4 tau^2/beta - 1` beyond which derivatives of `K` diverge at
/// `t = tau d` (asymptotic in `d`, meaningful for `tau << beta`).
pub fn singularity_order(beta: f64, tau: f64) -> f64 {
    4.0 * tau * tau / beta - 1.0
}

/// `sum_n sin(pi t)/sin(pi t/d_n)`, with the integer-`t` limit `d_n [t mod d_n = 0]`.
fn cycle_sum(cycles: &[usize], t: f64) -> f64 {
    if t.fract() == 0.0 {
        let ti = t.abs() as u128;
        cycles
            .iter()
            .filter(|&&n| ti % n as u128 == 0)
            .map(|&n| n as f64)
            .sum()
    } else {
        cycles
            .iter()
            .map(|&n| (PI * t).sin() / (PI * t / n as f64).sin())
            .sum()
    }
}

/// `K(t) = d - d e^{-g^2 t^2/d} + [sum_n sin(pi t)/sin(pi t/d_n)]^2 e^{-g^2 t^2/d}`.
pub fn perm_sff_prediction(d: usize, g: f64, cycles: &[usize], t: f64) -> Result<f64> {
    if cycles.iter().sum::<usize>() != d || cycles.contains(&0) {
        return Err(SffError::param(format!("cycle lengths {cycles:?} do not partition {d}")));
    }
    if !(g >= 0.0) || !g.is_finite() {
        return Err(SffError::param(format!("g must be finite and >= 0, got {g}")));
    }
    let df = d as f64;
    let damping = (-g * g * t * t / df).exp();
    let s = cycle_sum(cycles, t);
    Ok(df - df * damping + s * s * damping)
}

/// `K(tau d)/d = 1 + 2 Re 1/(e^{2 pi i g tau}[1 + 2 pi i (1-g) tau] - 1)`.
pub fn lax_sff_prediction(g: f64, tau: f64) -> Result<f64> {
    if !(g > 0.0 && g < 1.0) {
        return Err(SffError::param(format!("g must lie in (0, 1), got {g}")));
    }
    if !(tau > 0.0) {
        return Err(SffError::param(format!("tau must be positive, got {tau}")));
    }
    let denominator = c64::cis(2.0 * PI * g * tau) * c64::new(1.0, 2.0 * PI * (1.0 - g) * tau) - c64::new(1.0, 0.0);
    if denominator.norm() < 1e-12 {
        return Err(SffError::Singular(format!(
            "hard-rod prediction diverges at g = {g}, tau = {tau}"
        )));
    }
    Ok(1.0 + 2.0 * (c64::new(1.0, 0.0) / denominator).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    Cue,
    Poisson,
}

/// CUE ramp `min(t, d)` or Poisson plateau `d`; both equal `d^2` at `t = 0`.
pub fn reference_sff(kind: ReferenceKind, d: usize, t: f64) -> f64 {
    let df = d as f64;
    if t == 0.0 {
        return df * df;
    }
    match kind {
        ReferenceKind::Cue => t.abs().min(df),
        ReferenceKind::Poisson => df,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeScaleModel {
    Cbe { beta: f64 },
    Perm { g: f64 },
    Lax { g: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    pub t_heisenberg: f64,
    /// Time after which the crystalline peaks have died out.
    pub t_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_thouless: Option<f64>,
    /// Period of the weak late-time oscillation of the Lax form factor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub late_period: Option<f64>,
}

/// Order-of-magnitude time scales: `t_H = d`; `t_* = d sqrt(beta/4)` (CBE),
/// `sqrt(d ln d)/g` with `t_Th = sqrt(d)/g` (permutation model), and
/// `d/(1-g)` with late period `d/g` (Lax).
pub fn time_scales(d: usize, model: TimeScaleModel) -> TimeScales {
    let df = d as f64;
    match model {
        TimeScaleModel::Cbe { beta } => TimeScales {
            t_heisenberg: df,
            t_star: df * (beta / 4.0).sqrt(),
            t_thouless: None,
            late_period: None,
        },
        TimeScaleModel::Perm { g } => TimeScales {
            t_heisenberg: df,
            t_star: (df * df.ln()).sqrt() / g,
            t_thouless: Some(df.sqrt() / g),
            late_period: None,
        },
        TimeScaleModel::Lax { g } => TimeScales {
            t_heisenberg: df,
            t_star: df / (1.0 - g),
            t_thouless: None,
            late_period: Some(df / g),
        },
    }
}

/// Evaluates one theory overlay for `ensemble` on the time grid `t`.
pub fn theory_curve(kind: TheoryKind, ensemble: &Ensemble, t: &[f64], c: f64) -> Result<TheoryCurve> {
    let d = ensemble.dim();
    let df = d as f64;
    let incompatible = || {
        SffError::param(format!(
            "theory: {} is not available for this ensemble",
            kind.name()
        ))
    };
    let mut values = Vec::with_capacity(t.len());
    let mut labels = Vec::with_capacity(t.len());
    match kind {
        TheoryKind::CbeGaussian => {
            let Ensemble::Cbe(p) = ensemble else {
                return Err(incompatible());
            };
            for &ti in t {
                let k = cbe_gaussian_sff_with_c(d, p.beta, ti, c);
                values.push(k.value);
                labels.push(if k.valid { "valid" } else { "beyond_validity" }.to_string());
            }
        }
        TheoryKind::DwEnvelope => match ensemble {
            Ensemble::Cbe(p) => {
                for &ti in t {
                    let dw = debye_waller_with_c(d, p.beta, ti / df, c);
                    values.push(if ti == 0.0 { df * df } else { df + dw.value * (df * df - df) });
                    labels.push(dw.regime.name().to_string());
                }
            }
            Ensemble::Perm { g, .. } => {
                for &ti in t {
                    values.push(df + (-g * g * ti * ti / df).exp() * (df * df - df));
                    labels.push(String::new());
                }
            }
            _ => return Err(incompatible()),
        },
        TheoryKind::PermCycles => {
            let (g, permutation) = match ensemble {
                Ensemble::Perm { g, permutation } => (*g, permutation.clone()),
                Ensemble::Staircase(m) => (m.g, m.composed_permutation()),
                _ => return Err(incompatible()),
            };
            let cycles = permutation.cycle_lengths();
            for &ti in t {
                values.push(perm_sff_prediction(d, g, &cycles, ti)?);
                labels.push(String::new());
            }
        }
        TheoryKind::Lax => {
            let Ensemble::Lax { g, .. } = ensemble else {
                return Err(incompatible());
            };
            for &ti in t {
                values.push(if ti == 0.0 {
                    df * df
                } else {
                    df * lax_sff_prediction(*g, ti / df)?
                });
                labels.push(String::new());
            }
        }
        TheoryKind::Cue | TheoryKind::Poisson => {
            let reference = if kind == TheoryKind::Cue {
                ReferenceKind::Cue
            } else {
                ReferenceKind::Poisson
            };
            for &ti in t {
                values.push(reference_sff(reference, d, ti));
                labels.push(String::new());
            }
        }
    }
    Ok(TheoryCurve {
        kind,
        t: t.to_vec(),
        values,
        labels,
    })
}
