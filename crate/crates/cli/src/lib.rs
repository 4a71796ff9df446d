//! Experiment pipelines behind the `sff` command-line tool.
//!
//! Each config describes one experiment and one output directory. Sampled
//! curves are written as `t,K_mean,K_stderr,n` CSV with a JSON sidecar that
//! records the exact config, the tool version and run statistics.

mod error;
pub mod io;
pub mod run;
pub mod verify;

pub use error::{CliError, CliResult};
pub use io::{load_config, parse_config, parse_sample_csv, read_sample_csv};
pub use run::{
    run_compare, run_fit, run_sample, run_theory, CompareOptions, FitOptions, Overrides, SAMPLE_CSV, SAMPLE_SIDECAR,
};
pub use verify::{run_verify, VerifyReport};
