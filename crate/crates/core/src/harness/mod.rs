//! Experiment harness: TOML configs, seeded parallel runs, CSV traces,
//! JSON summaries, rate fitting, equal-budget comparisons and the oracle
//! validation suite.

pub mod compare;
pub mod config;
pub mod experiment;
pub mod rate;
pub mod trace_io;
pub mod validate;

use std::path::{Path, PathBuf};

pub use compare::{compare, compare_runs, CompareConfig, CompareOutcome, Comparison, ComparisonRow};
pub use config::{Experiment, ExperimentConfig, Initializer, SolverChoice};
pub use experiment::{median_from_files, read_summary, run_experiment, run_seed, run_seeds, SeedRun, SeedSummary, Summary};
pub use rate::{fit_rate, parse_window, RateFit};
pub use trace_io::{parse_trace, read_trace, trace_to_string, write_trace, TRACE_COLUMNS};
pub use validate::{validate, ValidateOptions, ValidationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUN_FAILURE: i32 = 1;
pub const EXIT_VALIDATION_FAILURE: i32 = 2;
pub const EXIT_CONFIG_ERROR: i32 = 3;

/// Overrides every configured output directory when set and non-empty.
pub const OUTPUT_DIR_ENV: &str = "ASYMPROX_OUTPUT_DIR";

/// Picks the output directory: environment override, then the configured
/// path, then `fallback`.
pub fn output_dir(configured: Option<&Path>, fallback: PathBuf) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => configured.map(Path::to_path_buf).unwrap_or(fallback),
    }
}

/// Median of finite values; the mean of the middle two for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}
