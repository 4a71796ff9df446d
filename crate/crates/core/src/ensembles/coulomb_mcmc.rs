//! Metropolis sampler of the log-gas on the unit circle,
//! `P(E) ∝ exp(-beta H)`, `H = -sum_{m<n} log|e^{iE_m} - e^{iE_n}|`.
//!
//! Verification oracle for the random-walk construction: it samples the
//! joint eigenphase density directly, without any matrix.

use rand::Rng;

use crate::rng::{sample_von_mises, uniform_phase};
use crate::spectral::EigenphaseSet;
use crate::{Result, SffError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcSettings {
    /// Sweeps discarded before the first sample (step size adapts here).
    pub burn_in_sweeps: usize,
    /// Sweeps between consecutive returned samples.
    pub thinning_sweeps: usize,
    /// Acceptance rate the step size is tuned towards during burn-in.
    pub target_acceptance: f64,
}

impl Default for McmcSettings {
    fn default() -> Self {
        Self {
            burn_in_sweeps: 1000,
            thinning_sweeps: 10,
            target_acceptance: 0.5,
        }
    }
}

/// A Metropolis chain over `d` phases with single-site von Mises proposals.
#[derive(Debug, Clone)]
pub struct CoulombGasChain {
    beta: f64,
    phases: Vec<f64>,
    kappa: f64,
    settings: McmcSettings,
    proposals: u64,
    accepted: u64,
}

/// `log|e^{ia} - e^{ib}| = log(2 |sin((a - b)/2)|)`.
#[inline]
fn pair_log(a: f64, b: f64) -> f64 {
    (2.0 * (0.5 * (a - b)).sin().abs()).ln()
}

fn wrap(angle: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = angle.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    if x <= -PI {
        x += TAU;
    }
    x
}

impl CoulombGasChain {
    /// Starts from independent uniform phases and runs the burn-in.
    pub fn new<R: Rng + ?Sized>(d: usize, beta: f64, settings: McmcSettings, rng: &mut R) -> Result<Self> {
        if d < 2 {
            return Err(SffError::param(format!("log-gas needs d >= 2, got {d}")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(SffError::param(format!("beta must be finite and >= 0, got {beta}")));
        }
        let phases = (0..d).map(|_| uniform_phase(rng)).collect();
        // initial concentration ~ (mean spacing)^-2
        let spacing = std::f64::consts::TAU / d as f64;
        let mut chain = Self {
            beta,
            phases,
            kappa: 1.0 / (spacing * spacing),
            settings,
            proposals: 0,
            accepted: 0,
        };
        let batch = 10;
        let mut done = 0;
        while done < settings.burn_in_sweeps {
            let before = (chain.proposals, chain.accepted);
            let n = batch.min(settings.burn_in_sweeps - done);
            for _ in 0..n {
                chain.sweep(rng);
            }
            done += n;
            let rate = (chain.accepted - before.1) as f64 / (chain.proposals - before.0) as f64;
            // larger kappa means smaller steps and higher acceptance
            chain.kappa *= (settings.target_acceptance / rate.max(1e-3)).powi(2).clamp(0.25, 4.0);
            chain.kappa = chain.kappa.clamp(1e-6, 1e12);
        }
        chain.proposals = 0;
        chain.accepted = 0;
        Ok(chain)
    }

    pub fn energy(&self) -> f64 {
        let mut h = 0.0;
        for m in 0..self.phases.len() {
            for n in m + 1..self.phases.len() {
                h -= pair_log(self.phases[m], self.phases[n]);
            }
        }
        h
    }

    fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let d = self.phases.len();
        for j in 0..d {
            let old = self.phases[j];
            let new = wrap(old + sample_von_mises(rng, self.kappa));
            let mut delta = 0.0;
            for (m, &other) in self.phases.iter().enumerate() {
                if m != j {
                    delta += pair_log(new, other) - pair_log(old, other);
                }
            }
            self.proposals += 1;
            // coincident phases give delta = -inf and are always rejected
            if delta.is_nan() || delta == f64::NEG_INFINITY {
                continue;
            }
            let log_ratio = self.beta * delta;
            if log_ratio >= 0.0 || rng.random::<f64>() < log_ratio.exp() {
                self.phases[j] = new;
                self.accepted += 1;
            }
        }
    }

    /// Runs the thinning sweeps and returns the current configuration.
    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> EigenphaseSet {
        for _ in 0..self.settings.thinning_sweeps.max(1) {
            self.sweep(rng);
        }
        EigenphaseSet::from_unsorted(self.phases.clone())
    }

    /// Acceptance rate since the end of burn-in.
    pub fn acceptance(&self) -> f64 {
        if self.proposals == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.proposals as f64
    }

    pub fn step_concentration(&self) -> f64 {
        self.kappa
    }
}

/// Result of an MCMC run with the post-adaptation acceptance diagnostic.
#[derive(Debug, Clone)]
pub struct McmcRun {
    pub samples: Vec<EigenphaseSet>,
    pub acceptance: f64,
    /// Set when the acceptance rate left `(0.1, 0.9)` after adaptation.
    pub acceptance_warning: bool,
}

/// Draws `n_samples` thinned configurations from one chain.
pub fn mcmc_coulomb_samples<R: Rng + ?Sized>(
    d: usize,
    beta: f64,
    n_samples: usize,
    settings: McmcSettings,
    rng: &mut R,
) -> Result<McmcRun> {
    let mut chain = CoulombGasChain::new(d, beta, settings, rng)?;
    let samples = (0..n_samples).map(|_| chain.next_sample(rng)).collect();
    let acceptance = chain.acceptance();
    Ok(McmcRun {
        samples,
        acceptance,
        acceptance_warning: !(acceptance > 0.1 && acceptance < 0.9),
    })
}

/// One decorrelated configuration (a fresh chain with burn-in).
pub fn mcmc_coulomb_sample<R: Rng + ?Sized>(d: usize, beta: f64, rng: &mut R, sweeps: usize) -> Result<McmcRun> {
    let settings = McmcSettings {
        burn_in_sweeps: sweeps,
        ..McmcSettings::default()
    };
    mcmc_coulomb_samples(d, beta, 1, settings, rng)
}
