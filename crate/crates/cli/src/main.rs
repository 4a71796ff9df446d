use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sff_cli::{
    load_config, run_compare, run_fit, run_sample, run_theory, run_verify, CliError, CliResult, CompareOptions,
    FitOptions, Overrides,
};

#[derive(Parser)]
#[command(name = "sff", version, about = "Spectral form factors of crystalline random unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config.
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            workers: self.workers,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo estimate of K(t); writes sff.csv and sff.json.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Also dump the first N sample matrices in binary form.
        #[arg(long, value_name = "N", default_value_t = 0)]
        dump_matrices: usize,
    },
    /// Theory overlays on the config's time grid.
    Theory {
        #[command(flatten)]
        common: Common,
    },
    /// Debye-Waller fit of the Bragg peaks in a sample CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        /// Peak period in units of t.
        #[arg(long)]
        period: usize,
        #[arg(long)]
        tau_max: usize,
        /// Dimension; inferred from K(0) when omitted.
        #[arg(long)]
        dim: Option<usize>,
        /// Coupling of a local model, to report its alpha.
        #[arg(long)]
        g: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares a sample CSV with the theory overlays of its config.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Sample CSV; defaults to sff.csv in the output directory.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        t_min: Option<usize>,
        #[arg(long)]
        t_max: Option<usize>,
        /// Moving-average width; defaults to ceil(d/50).
        #[arg(long)]
        window: Option<usize>,
    },
    /// Runs the built-in oracle checks.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sample { common, dump_matrices } => {
            let config = load_config(&common.config)?;
            let outcome = run_sample(&config, &common.overrides(), dump_matrices)?;
            eprintln!(
                "{} samples ({} failed) -> {}",
                outcome.curve.n_samples,
                outcome.curve.n_failed,
                outcome.csv.display()
            );
        }
        Command::Theory { common } => {
            let config = load_config(&common.config)?;
            let outcome = run_theory(&config, &common.overrides())?;
            for f in &outcome.files {
                eprintln!("{}", f.display());
            }
        }
        Command::Fit {
            csv,
            period,
            tau_max,
            dim,
            g,
            out,
        } => {
            let outcome = run_fit(&FitOptions {
                csv,
                period,
                tau_max,
                dim,
                g,
                out,
            })?;
            let fit = &outcome.report.fit;
            eprintln!(
                "slope {:.6e} +- {:.2e} (decay detected: {}) -> {}",
                fit.slope,
                fit.slope_stderr,
                fit.decay_detected,
                outcome.path.display()
            );
        }
        Command::Compare {
            common,
            csv,
            t_min,
            t_max,
            window,
        } => {
            let config = load_config(&common.config)?;
            let t_range = match (t_min, t_max) {
                (None, None) => None,
                (lo, hi) => Some((lo.unwrap_or(1), hi.unwrap_or(config.t_max))),
            };
            let outcome = run_compare(&config, &common.overrides(), &CompareOptions { csv, t_range, window })?;
            for c in &outcome.file.comparisons {
                eprintln!(
                    "{}: smoothed max rel. deviation {:.4}, beyond 3 stderr {:.4}",
                    c.kind.name(),
                    c.report.smoothed_max_rel_deviation,
                    c.report.fraction_beyond_3_stderr
                );
            }
        }
        Command::Verify { config, out } => {
            let config = config.as_deref().map(load_config).transpose()?;
            let report = run_verify(config.as_ref())?;
            for c in &report.checks {
                println!(
                    "{} {} value={:.3e} tol={:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            if let Some(dir) = out {
                sff_cli::io::prepare_output_dir(&dir)?;
                sff_cli::io::write_json(&dir.join("verify.json"), &report)?;
            }
            if !report.passed() {
                return Err(CliError::Numerical("oracle checks failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
