//! Config loading and the CSV exchange format.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sff_core::{ExperimentConfig, SffCurve, TheoryCurve};

use crate::error::{CliError, CliResult};

pub const SAMPLE_HEADER: &str = "t,K_mean,K_stderr,n";
pub const THEORY_HEADER: &str = "t,K_mean,n";

pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("config field `{path}`: {}", e.inner().message().trim()))
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn config_to_toml(config: &ExperimentConfig) -> CliResult<String> {
    toml::to_string(config).map_err(|e| CliError::Config(format!("config serialization: {e}")))
}

pub fn sample_csv(curve: &SffCurve) -> String {
    let mut s = String::with_capacity(32 * (curve.t_max + 2));
    s.push_str(SAMPLE_HEADER);
    s.push('\n');
    for t in curve.times() {
        writeln!(s, "{t},{},{},{}", curve.mean[t], curve.stderr[t], curve.n_samples).unwrap();
    }
    s
}

pub fn theory_csv(curve: &TheoryCurve) -> String {
    let mut s = String::with_capacity(32 * (curve.t.len() + 1));
    s.push_str(THEORY_HEADER);
    s.push('\n');
    for (t, k) in curve.t.iter().zip(&curve.values) {
        writeln!(s, "{t},{k},0").unwrap();
    }
    s
}

/// Parses a sample CSV. Rows must list `t = 0, 1, 2, ...` in order.
/// The dimension is taken from `dim` or else from `K(0) = d^2`.
pub fn parse_sample_csv(text: &str, dim: Option<usize>) -> CliResult<SffCurve> {
    let bad = |line: u64, msg: String| CliError::Config(format!("CSV line {line}: {msg}"));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(1, e.to_string()))?;
    if header != SAMPLE_HEADER.split(',').collect::<Vec<_>>() {
        return Err(bad(1, format!("expected header `{SAMPLE_HEADER}`, found `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut mean = Vec::new();
    let mut stderr = Vec::new();
    let mut n_samples = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(line, e.to_string())
        })?;
        let n = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or_default();
        let t: usize = field(0).parse().map_err(|e| bad(n, format!("t: {e}")))?;
        if t != mean.len() {
            return Err(bad(n, format!("expected t = {}, found {t}", mean.len())));
        }
        let k: f64 = field(1).parse().map_err(|e| bad(n, format!("K_mean: {e}")))?;
        let e: f64 = field(2).parse().map_err(|e| bad(n, format!("K_stderr: {e}")))?;
        n_samples = field(3).parse().map_err(|e| bad(n, format!("n: {e}")))?;
        if !k.is_finite() || !(e >= 0.0) {
            return Err(bad(n, format!("non-finite or negative values in row t = {t}")));
        }
        mean.push(k);
        stderr.push(e);
    }
    if mean.is_empty() {
        return Err(bad(2, "no data rows".into()));
    }
    let dim = match dim {
        Some(d) => d,
        None => {
            let d = mean[0].sqrt().round();
            if d < 1.0 || (d * d - mean[0]).abs() > 1e-6 * mean[0] {
                return Err(bad(2, format!("K(0) = {} is not a square; pass the dimension explicitly", mean[0])));
            }
            d as usize
        }
    };
    Ok(SffCurve::from_values(dim, mean, stderr, n_samples)?)
}

pub fn read_sample_csv(path: &Path, dim: Option<usize>) -> CliResult<SffCurve> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_sample_csv(&text, dim).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Creates `dir` and checks that a file can be written there.
pub fn prepare_output_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let probe = dir.join(".sff-write-probe");
    fs::write(&probe, b"").map_err(|e| CliError::io(dir, e))?;
    fs::remove_file(&probe).map_err(|e| CliError::io(&probe, e))?;
    Ok(())
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_file(path, text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn resolve_output(cli: Option<&Path>, config: Option<&ExperimentConfig>) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| config.and_then(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("sff-output"))
}
