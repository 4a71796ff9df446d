//! The `sample`, `theory`, `fit` and `compare` pipelines.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sff_core::analysis::{compare_curves, extract_peaks, fit_debye_waller, CompareReport, FitResult, PeakSeries};
use sff_core::config::TheoryKind;
use sff_core::ensembles::Ensemble;
use sff_core::rng::SeedSpec;
use sff_core::spectral::monte_carlo_sff;
use sff_core::theory::{theory_curve, time_scales, TimeScaleModel, TimeScales, GAUSSIAN_C};
use sff_core::{ExperimentConfig, SffCurve, TheoryCurve};

use crate::error::{CliError, CliResult};
use crate::io::{
    config_to_toml, parse_config, prepare_output_dir, read_json, read_sample_csv, resolve_output, sample_csv, theory_csv,
    write_file, write_json,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SAMPLE_CSV: &str = "sff.csv";
pub const SAMPLE_SIDECAR: &str = "sff.json";

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, config: &ExperimentConfig) -> CliResult<(ExperimentConfig, PathBuf)> {
        let mut config = config.clone();
        if let Some(w) = self.workers {
            config.workers = Some(w);
        }
        if let Some(s) = self.seed {
            config.master_seed = s;
        }
        let out = resolve_output(self.out.as_deref(), Some(&config));
        config.output = Some(out.clone());
        config.validate()?;
        Ok((config, out))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub version: String,
    pub csv: String,
    pub dim: usize,
    pub n_samples: usize,
    pub n_failed: usize,
    pub workers: usize,
    pub wall_time_s: f64,
    pub matrices_dumped: usize,
    /// Readable copy of the config; `config_toml` is exact (JSON turns `inf` into `null`).
    pub config: serde_json::Value,
    pub config_toml: String,
}

#[derive(Debug)]
pub struct SampleOutcome {
    pub curve: SffCurve,
    pub csv: PathBuf,
    pub sidecar: PathBuf,
}

/// Runs the Monte-Carlo estimate and writes `sff.csv` and `sff.json`.
/// The first `dump_matrices` samples are also written as binary dumps.
pub fn run_sample(config: &ExperimentConfig, overrides: &Overrides, dump_matrices: usize) -> CliResult<SampleOutcome> {
    let (config, out) = overrides.apply(config)?;
    prepare_output_dir(&out)?;
    let config_toml = config_to_toml(&config)?;
    let start = Instant::now();

    if dump_matrices > 0 {
        let dir = out.join("matrices");
        prepare_output_dir(&dir)?;
        let ensemble = Ensemble::from_spec(&config.ensemble)?;
        for i in 0..dump_matrices.min(config.n_samples) {
            let u = ensemble.sample_seeded(SeedSpec::new(config.master_seed, i as u64))?;
            let path = dir.join(format!("sample_{i:06}.bin"));
            let mut bytes = Vec::new();
            u.write_dump(&mut bytes)?;
            write_file(&path, bytes)?;
        }
    }

    let curve = monte_carlo_sff(&config)?;
    let csv = out.join(SAMPLE_CSV);
    write_file(&csv, sample_csv(&curve))?;
    let sidecar = out.join(SAMPLE_SIDECAR);
    write_json(
        &sidecar,
        &SampleSidecar {
            version: VERSION.to_string(),
            csv: SAMPLE_CSV.to_string(),
            dim: curve.dim,
            n_samples: curve.n_samples,
            n_failed: curve.n_failed,
            workers: config.workers(),
            wall_time_s: start.elapsed().as_secs_f64(),
            matrices_dumped: dump_matrices.min(config.n_samples),
            config: config_json(&config),
            config_toml,
        },
    )?;
    Ok(SampleOutcome { curve, csv, sidecar })
}

/// Overlays emitted when a config requests none.
pub fn default_theory_kinds(ensemble: &Ensemble) -> Vec<TheoryKind> {
    match ensemble {
        Ensemble::Cbe(_) => vec![TheoryKind::CbeGaussian, TheoryKind::DwEnvelope, TheoryKind::Cue],
        Ensemble::Perm { .. } => vec![TheoryKind::PermCycles, TheoryKind::DwEnvelope, TheoryKind::Cue],
        Ensemble::Staircase(_) => vec![TheoryKind::PermCycles, TheoryKind::Cue],
        Ensemble::Lax { .. } => vec![TheoryKind::Lax, TheoryKind::Poisson],
        Ensemble::LaxLimit { .. } => vec![TheoryKind::Poisson],
    }
}

/// Times `t = 0..=t_max`, or `t = d tau` on the configured tau grid.
pub fn theory_times(config: &ExperimentConfig) -> Vec<f64> {
    let d = config.ensemble.dim() as f64;
    match config.theory_grid {
        Some(grid) => {
            let n = (grid.tau_max / grid.tau_step + 1e-9).floor() as usize;
            (1..=n).map(|k| d * k as f64 * grid.tau_step).collect()
        }
        None => (0..=config.t_max).map(|t| t as f64).collect(),
    }
}

fn time_scale_summary(ensemble: &Ensemble) -> Option<TimeScales> {
    let d = ensemble.dim();
    match ensemble {
        Ensemble::Cbe(p) => Some(time_scales(d, TimeScaleModel::Cbe { beta: p.beta })),
        Ensemble::Perm { g, .. } => Some(time_scales(d, TimeScaleModel::Perm { g: *g })),
        Ensemble::Lax { g, .. } => Some(time_scales(d, TimeScaleModel::Lax { g: *g })),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoryFile {
    pub kind: TheoryKind,
    pub csv: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheorySidecar {
    pub version: String,
    pub gaussian_c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_scales: Option<TimeScales>,
    pub curves: Vec<TheoryFile>,
    pub config: serde_json::Value,
    pub config_toml: String,
}

#[derive(Debug)]
pub struct TheoryOutcome {
    pub curves: Vec<TheoryCurve>,
    pub files: Vec<PathBuf>,
    pub sidecar: PathBuf,
}

pub fn theory_file_name(kind: TheoryKind) -> String {
    format!("theory_{}.csv", kind.name())
}

/// Evaluates every requested overlay (before anything is written).
pub fn compute_theory(config: &ExperimentConfig, times: &[f64]) -> CliResult<Vec<TheoryCurve>> {
    let ensemble = Ensemble::from_spec(&config.ensemble)?;
    let kinds = if config.theory.is_empty() {
        default_theory_kinds(&ensemble)
    } else {
        config.theory.clone()
    };
    let c = config.gaussian_c.unwrap_or(GAUSSIAN_C);
    kinds
        .iter()
        .map(|&kind| theory_curve(kind, &ensemble, times, c).map_err(CliError::from))
        .collect()
}

pub fn run_theory(config: &ExperimentConfig, overrides: &Overrides) -> CliResult<TheoryOutcome> {
    let (config, out) = overrides.apply(config)?;
    prepare_output_dir(&out)?;
    let curves = compute_theory(&config, &theory_times(&config))?;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for curve in &curves {
        let name = theory_file_name(curve.kind);
        let path = out.join(&name);
        write_file(&path, theory_csv(curve))?;
        files.push(path);
        entries.push(TheoryFile {
            kind: curve.kind,
            csv: name,
            labels: if curve.labels.iter().all(String::is_empty) {
                Vec::new()
            } else {
                curve.labels.clone()
            },
        });
    }
    let sidecar = out.join("theory.json");
    write_json(
        &sidecar,
        &TheorySidecar {
            version: VERSION.to_string(),
            gaussian_c: config.gaussian_c.unwrap_or(GAUSSIAN_C),
            time_scales: time_scale_summary(&Ensemble::from_spec(&config.ensemble)?),
            curves: entries,
            config_toml: config_to_toml(&config)?,
            config: config_json(&config),
        },
    )?;
    Ok(TheoryOutcome { curves, files, sidecar })
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub csv: PathBuf,
    pub period: usize,
    pub tau_max: usize,
    /// Dimension; read from `K(0) = d^2` when absent.
    pub dim: Option<usize>,
    /// Coupling used to convert the slope into the local-model `alpha`.
    pub g: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResidual {
    pub tau: f64,
    pub ln_height: f64,
    pub model: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedParameters {
    pub perm_g2d: Option<[f64; 2]>,
    pub pinning_alpha: Option<[f64; 2]>,
    pub cbe_effective_beta: Option<[f64; 2]>,
    pub local_alpha: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub version: String,
    pub source: String,
    pub tau_max: usize,
    pub fit: FitResult,
    pub excluded_tau: Vec<f64>,
    pub residuals: Vec<FitResidual>,
    /// `[value, stderr]` pairs, `None` without a detected decay; only meaningful for the matching model.
    pub derived: DerivedParameters,
    pub peaks: PeakSeries,
    /// Config of the run that produced the CSV, when its sidecar was found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_toml: Option<String>,
}

#[derive(Debug)]
pub struct FitOutcome {
    pub report: FitReport,
    pub path: PathBuf,
}

pub fn fit_curve(curve: &SffCurve, period: usize, tau_max: usize, g: Option<f64>) -> CliResult<(FitResult, PeakSeries, Vec<FitResidual>, DerivedParameters)> {
    let peaks = extract_peaks(curve, period, tau_max)?;
    let fit = fit_debye_waller(&peaks)?;
    let residuals = fit
        .used_tau
        .iter()
        .map(|&tau| {
            let i = peaks.tau.iter().position(|&x| x == tau).expect("used peak");
            let ln_height = peaks.heights[i].ln();
            let model = fit.intercept - fit.slope * tau * tau;
            FitResidual {
                tau,
                ln_height,
                model,
                residual: ln_height - model,
            }
        })
        .collect();
    let pair = |(v, e): (f64, f64)| (fit.decay_detected && v.is_finite() && e.is_finite()).then_some([v, e]);
    let derived = DerivedParameters {
        perm_g2d: pair(fit.perm_g2d()),
        pinning_alpha: pair(fit.pinning_alpha()),
        cbe_effective_beta: pair(fit.cbe_effective_beta()),
        local_alpha: g.and_then(|g| pair(fit.local_alpha(g))),
    };
    Ok((fit, peaks, residuals, derived))
}

/// `config_toml` of the sidecar next to `csv`, if it parses.
fn sibling_config(csv: &Path) -> Option<String> {
    let sidecar: SampleSidecar = read_json(&csv.with_file_name(SAMPLE_SIDECAR)).ok()?;
    parse_config(&sidecar.config_toml).ok()?;
    Some(sidecar.config_toml)
}

fn config_json(config: &ExperimentConfig) -> serde_json::Value {
    serde_json::to_value(config).unwrap_or(serde_json::Value::Null)
}

pub fn run_fit(options: &FitOptions) -> CliResult<FitOutcome> {
    let out = options
        .out
        .clone()
        .or_else(|| options.csv.parent().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("."));
    prepare_output_dir(&out)?;
    let curve = read_sample_csv(&options.csv, options.dim)?;
    let (fit, peaks, residuals, derived) = fit_curve(&curve, options.period, options.tau_max, options.g)?;
    let report = FitReport {
        version: VERSION.to_string(),
        source: options.csv.display().to_string(),
        tau_max: options.tau_max,
        excluded_tau: fit.excluded_tau.clone(),
        fit,
        residuals,
        derived,
        peaks,
        config_toml: sibling_config(&options.csv),
    };
    let path = out.join(format!("fit_p{}.json", options.period));
    write_json(&path, &report)?;
    Ok(FitOutcome { report, path })
}

#[derive(Debug, Clone, Default)]
pub struct CompareOptions {
    /// Sample CSV; defaults to `sff.csv` in the output directory.
    pub csv: Option<PathBuf>,
    pub t_range: Option<(usize, usize)>,
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareEntry {
    pub kind: TheoryKind,
    pub report: CompareReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareFile {
    pub version: String,
    pub source: String,
    pub comparisons: Vec<CompareEntry>,
    pub config: serde_json::Value,
    pub config_toml: String,
}

#[derive(Debug)]
pub struct CompareOutcome {
    pub file: CompareFile,
    pub path: PathBuf,
}

/// Compares a sample CSV against the theory overlays of `config`.
pub fn run_compare(config: &ExperimentConfig, overrides: &Overrides, options: &CompareOptions) -> CliResult<CompareOutcome> {
    let (config, out) = overrides.apply(config)?;
    prepare_output_dir(&out)?;
    let csv = options.csv.clone().unwrap_or_else(|| out.join(SAMPLE_CSV));
    let curve = read_sample_csv(&csv, Some(config.ensemble.dim()))?;
    let times: Vec<f64> = curve.times().map(|t| t as f64).collect();
    let range = options.t_range.unwrap_or((1, curve.t_max));
    let comparisons = compute_theory(&config, &times)?
        .iter()
        .map(|theory| {
            Ok(CompareEntry {
                kind: theory.kind,
                report: compare_curves(&curve, theory, range, options.window)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let file = CompareFile {
        version: VERSION.to_string(),
        source: csv.display().to_string(),
        comparisons,
        config_toml: config_to_toml(&config)?,
        config: config_json(&config),
    };
    let path = out.join("compare.json");
    write_json(&path, &file)?;
    Ok(CompareOutcome { file, path })
}
