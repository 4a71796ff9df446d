//! Seeded Monte-Carlo estimate of `K(t)`.
//!
//! Sample `i` is drawn from the stream `(master_seed, i)`. Samples are computed
//! in parallel chunk by chunk and merged in ascending index order with a
//! Welford update, so the result is bit-identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigenphases::unitary_eigenphases_checked;
use super::sff::sff_from_phases;
use crate::config::{EigenCheck, ExperimentConfig};
use crate::ensembles::Ensemble;
use crate::rng::SeedSpec;
use crate::{Result, SffError};

/// Monte-Carlo estimate of the form factor on `t = 0..=t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SffCurve {
    pub dim: usize,
    pub t_max: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Samples that entered the average.
    pub n_samples: usize,
    pub n_failed: usize,
    pub ensemble: String,
    pub master_seed: u64,
}

impl SffCurve {
    /// Builds a curve from externally computed values (e.g. read back from CSV).
    pub fn from_values(dim: usize, mean: Vec<f64>, stderr: Vec<f64>, n_samples: usize) -> Result<Self> {
        if mean.is_empty() || mean.len() != stderr.len() {
            return Err(SffError::param("mean and stderr must be non-empty and of equal length"));
        }
        Ok(Self {
            dim,
            t_max: mean.len() - 1,
            mean,
            stderr,
            n_samples,
            n_failed: 0,
            ensemble: String::new(),
            master_seed: 0,
        })
    }

    pub fn times(&self) -> impl Iterator<Item = usize> {
        0..=self.t_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloOptions {
    pub n_samples: usize,
    pub master_seed: u64,
    pub t_max: usize,
    pub workers: usize,
    pub eigen_check: EigenCheck,
}

/// `|tr U^t|^2` of one sample.
pub fn sample_sff(ensemble: &Ensemble, seed: SeedSpec, t_max: usize, check: EigenCheck) -> Result<Vec<f64>> {
    let u = ensemble.sample_seeded(seed)?;
    let (phases, _) = unitary_eigenphases_checked(&u, check)?;
    Ok(sff_from_phases(&phases, t_max))
}

pub fn monte_carlo_sff(config: &ExperimentConfig) -> Result<SffCurve> {
    config.validate()?;
    let ensemble = Ensemble::from_spec(&config.ensemble)?;
    let mut curve = monte_carlo_sff_with(
        &ensemble,
        MonteCarloOptions {
            n_samples: config.n_samples,
            master_seed: config.master_seed,
            t_max: config.t_max,
            workers: config.workers(),
            eigen_check: config.eigen_check,
        },
    )?;
    curve.ensemble = config.ensemble.name().to_string();
    Ok(curve)
}

struct Welford {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    fn new(len: usize) -> Self {
        Self {
            n: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    fn stderr(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.m2.iter().map(|s| (s / (n - 1.0) / n).sqrt()).collect()
    }
}

fn is_sample_failure(err: &SffError) -> bool {
    matches!(err, SffError::Numerical(_))
}

pub fn monte_carlo_sff_with(ensemble: &Ensemble, options: MonteCarloOptions) -> Result<SffCurve> {
    if options.n_samples < 2 {
        return Err(SffError::param(format!(
            "n_samples: need at least 2 samples, got {}",
            options.n_samples
        )));
    }
    if options.workers == 0 {
        return Err(SffError::param("workers: must be >= 1"));
    }
    faer::set_global_parallelism(faer::Par::Seq);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| SffError::Resource(format!("worker pool: {e}")))?;

    let len = options.t_max + 1;
    // bound the buffered per-sample curves to roughly 64 MiB
    let chunk = (options.workers * 16).max(32).min((8 << 20) / len.max(1)).max(1);
    let allowed_failures = options.n_samples / 1000;
    let mut acc = Welford::new(len);
    let mut failed = 0usize;
    let mut first_failure: Option<String> = None;

    let mut start = 0usize;
    while start < options.n_samples {
        let end = (start + chunk).min(options.n_samples);
        let results: Vec<Result<Vec<f64>>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| {
                    sample_sff(
                        ensemble,
                        SeedSpec::new(options.master_seed, i as u64),
                        options.t_max,
                        options.eigen_check,
                    )
                })
                .collect()
        });
        for (offset, result) in results.into_iter().enumerate() {
            match result {
                Ok(k) => acc.push(&k),
                Err(e) if is_sample_failure(&e) => {
                    failed += 1;
                    first_failure.get_or_insert_with(|| format!("sample {}: {e}", start + offset));
                    if failed > allowed_failures {
                        return Err(SffError::TooManyFailures {
                            failed,
                            total: options.n_samples,
                            first: first_failure.unwrap_or_default(),
                        });
                    }
                }
                Err(e) => return Err(e),
            }
        }
        start = end;
    }
    if acc.n < 2 {
        return Err(SffError::InsufficientData(format!("only {} successful samples", acc.n)));
    }
    Ok(SffCurve {
        dim: ensemble.dim(),
        t_max: options.t_max,
        stderr: acc.stderr(),
        mean: acc.mean,
        n_samples: acc.n,
        n_failed: failed,
        ensemble: String::new(),
        master_seed: options.master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let data = [[1.0, 5.0], [2.0, 5.0], [4.0, 5.0], [8.0, 5.0]];
        let mut w = Welford::new(2);
        for x in &data {
            w.push(x);
        }
        let mean = 15.0 / 4.0;
        let var = data.iter().map(|x| (x[0] - mean).powi(2)).sum::<f64>() / 3.0;
        assert!((w.mean[0] - mean).abs() < 1e-15);
        assert!((w.stderr()[0] - (var / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(w.stderr()[1], 0.0);
    }
}
