//! Bragg-peak extraction, Debye-Waller fits and theory-vs-numerics reports.

use serde::{Deserialize, Serialize};

use crate::spectral::SffCurve;
use crate::theory::TheoryCurve;
use crate::{Result, SffError};

/// Normalized heights `h = (K(tau P) - d)/(d^2 - d)` of the peaks at
/// `t = tau P`, `tau = 1..=tau_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSeries {
    pub dim: usize,
    pub period: usize,
    pub times: Vec<usize>,
    pub tau: Vec<f64>,
    pub heights: Vec<f64>,
    pub stderr: Vec<f64>,
}

pub fn extract_peaks(curve: &SffCurve, period: usize, tau_max: usize) -> Result<PeakSeries> {
    if period == 0 {
        return Err(SffError::param("period must be positive"));
    }
    if tau_max == 0 || period * tau_max > curve.t_max {
        return Err(SffError::param(format!(
            "peaks up to t = {} requested but the curve ends at t = {}",
            period * tau_max,
            curve.t_max
        )));
    }
    if curve.dim < 2 {
        return Err(SffError::param("peak heights need d >= 2"));
    }
    let d = curve.dim as f64;
    let norm = d * d - d;
    let times: Vec<usize> = (1..=tau_max).map(|k| k * period).collect();
    Ok(PeakSeries {
        dim: curve.dim,
        period,
        tau: (1..=tau_max).map(|k| k as f64).collect(),
        heights: times.iter().map(|&t| (curve.mean[t] - d) / norm).collect(),
        stderr: times.iter().map(|&t| curve.stderr[t] / norm).collect(),
        times,
    })
}

/// Weighted straight-line fit `ln h = intercept - slope tau^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub dim: usize,
    pub period: usize,
    /// Decay rate `s` per unit `tau^2` (positive for decaying peaks).
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub intercept_stderr: f64,
    /// Weighted residual norm `sqrt(sum w r^2)`.
    pub residual_norm: f64,
    pub dof: usize,
    /// True when every usable peak had a zero standard error and unit weights were used.
    pub unit_weights: bool,
    pub used_tau: Vec<f64>,
    pub excluded_tau: Vec<f64>,
    /// False when no significant decay (`slope <= 0` within errors) was found.
    pub decay_detected: bool,
}

impl FitResult {
    /// `g^2 d` of the global permutation model, whose peaks decay as `e^{-g^2 t^2/d}`.
    pub fn perm_g2d(&self) -> (f64, f64) {
        let f = (self.dim as f64 / self.period as f64).powi(2);
        (self.slope * f, self.slope_stderr * f)
    }

    /// Pinning strength `alpha = d/g^2` of the permutation model.
    pub fn pinning_alpha(&self) -> (f64, f64) {
        let p2 = (self.period as f64).powi(2);
        (p2 / self.slope, p2 * self.slope_stderr / (self.slope * self.slope))
    }

    /// Factor `alpha` of a local model with envelope `e^{-alpha g^2 d (t/d)^2}`.
    pub fn local_alpha(&self, g: f64) -> (f64, f64) {
        let f = self.dim as f64 / (g * g * (self.period as f64).powi(2));
        (self.slope * f, self.slope_stderr * f)
    }

    /// `beta_eff = 4 ln d / s` of the circular beta-ensemble (period `d`).
    pub fn cbe_effective_beta(&self) -> (f64, f64) {
        let l = 4.0 * (self.dim as f64).ln();
        (l / self.slope, l * self.slope_stderr / (self.slope * self.slope))
    }
}

pub fn fit_debye_waller(peaks: &PeakSeries) -> Result<FitResult> {
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for i in 0..peaks.heights.len() {
        let (h, e) = (peaks.heights[i], peaks.stderr[i]);
        if h > 0.0 && h > 2.0 * e && h.is_finite() {
            used.push(i);
        } else {
            excluded.push(peaks.tau[i]);
        }
    }
    if used.len() < 3 {
        return Err(SffError::InsufficientData(format!(
            "{} usable peaks (need 3 with h > 2 stderr)",
            used.len()
        )));
    }
    let unit_weights = used.iter().any(|&i| peaks.stderr[i] == 0.0);
    let x: Vec<f64> = used.iter().map(|&i| peaks.tau[i] * peaks.tau[i]).collect();
    let y: Vec<f64> = used.iter().map(|&i| peaks.heights[i].ln()).collect();
    let w: Vec<f64> = used
        .iter()
        .map(|&i| {
            if unit_weights {
                1.0
            } else {
                // var(ln h) = (stderr/h)^2
                (peaks.heights[i] / peaks.stderr[i]).powi(2)
            }
        })
        .collect();

    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(&x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(&y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(&x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(&x).zip(&y).map(|((w, x), y)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    if !(det > 0.0) {
        return Err(SffError::InsufficientData("degenerate peak abscissae".into()));
    }
    let b = (sw * sxy - sx * sy) / det;
    let a = (sxx * sy - sx * sxy) / det;
    let rss: f64 = w
        .iter()
        .zip(&x)
        .zip(&y)
        .map(|((w, x), y)| w * (y - a - b * x).powi(2))
        .sum();
    let dof = used.len() - 2;
    // covariance scaled by the reduced chi-square
    let scale = rss / dof as f64;
    let slope_stderr = (scale * sw / det).sqrt();
    let intercept_stderr = (scale * sxx / det).sqrt();
    let slope = -b;
    Ok(FitResult {
        dim: peaks.dim,
        period: peaks.period,
        slope,
        slope_stderr,
        intercept: a,
        intercept_stderr,
        residual_norm: rss.sqrt(),
        dof,
        unit_weights,
        used_tau: used.iter().map(|&i| peaks.tau[i]).collect(),
        excluded_tau: excluded,
        decay_detected: slope > 1e-12 && slope > 2.0 * slope_stderr,
    })
}

/// Agreement between a Monte-Carlo curve and a theory curve on integer `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub t_min: usize,
    pub t_max: usize,
    pub n_points: usize,
    pub window: usize,
    /// `|numeric - theory| / |theory|`, pointwise.
    pub max_rel_deviation: f64,
    pub mean_rel_deviation: f64,
    /// Same after a centered moving average of width `window` on both curves.
    pub smoothed_max_rel_deviation: f64,
    pub smoothed_mean_rel_deviation: f64,
    pub worst_t: usize,
    pub smoothed_worst_t: usize,
    pub n_beyond_3_stderr: usize,
    pub fraction_beyond_3_stderr: f64,
}

/// Default smoothing width `ceil(d/50)`.
pub fn default_window(d: usize) -> usize {
    d.div_ceil(50).max(1)
}

fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let n = values.len();
    let back = (window - 1) / 2;
    let ahead = window / 2;
    let mut prefix = vec![0.0; n + 1];
    for (i, v) in values.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(back);
            let hi = (i + ahead).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect()
}

/// Compares on the integer times in `t_range` (inclusive) present in both curves.
pub fn compare_curves(
    numeric: &SffCurve,
    theory: &TheoryCurve,
    t_range: (usize, usize),
    window: Option<usize>,
) -> Result<CompareReport> {
    let (lo, hi) = t_range;
    let mut points = Vec::new();
    for (&t, &v) in theory.t.iter().zip(&theory.values) {
        if t.fract() != 0.0 || t < 0.0 {
            continue;
        }
        let ti = t as usize;
        if ti >= lo && ti <= hi && ti <= numeric.t_max {
            points.push((ti, numeric.mean[ti], numeric.stderr[ti], v));
        }
    }
    points.sort_by_key(|p| p.0);
    points.dedup_by_key(|p| p.0);
    if points.is_empty() {
        return Err(SffError::param(format!(
            "curves do not overlap on t in [{lo}, {hi}]"
        )));
    }
    let window = window.unwrap_or_else(|| default_window(numeric.dim)).max(1);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();

    let n = points.len();
    let mut max_rel = 0.0f64;
    let mut worst_t = points[0].0;
    let mut sum_rel = 0.0;
    let mut beyond = 0;
    for &(t, k, e, th) in &points {
        let r = rel(k, th);
        if r > max_rel || r.is_nan() {
            max_rel = r;
            worst_t = t;
        }
        sum_rel += r;
        if (k - th).abs() > 3.0 * e {
            beyond += 1;
        }
    }
    let num_s = moving_average(&points.iter().map(|p| p.1).collect::<Vec<_>>(), window);
    let th_s = moving_average(&points.iter().map(|p| p.3).collect::<Vec<_>>(), window);
    let mut smax = 0.0f64;
    let mut sworst = points[0].0;
    let mut ssum = 0.0;
    for i in 0..n {
        let r = rel(num_s[i], th_s[i]);
        if r > smax || r.is_nan() {
            smax = r;
            sworst = points[i].0;
        }
        ssum += r;
    }
    Ok(CompareReport {
        t_min: points[0].0,
        t_max: points[n - 1].0,
        n_points: n,
        window,
        max_rel_deviation: max_rel,
        mean_rel_deviation: sum_rel / n as f64,
        smoothed_max_rel_deviation: smax,
        smoothed_mean_rel_deviation: ssum / n as f64,
        worst_t,
        smoothed_worst_t: sworst,
        n_beyond_3_stderr: beyond,
        fraction_beyond_3_stderr: beyond as f64 / n as f64,
    })
}
