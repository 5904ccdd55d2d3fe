use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use asymprox::harness::{self, experiment::default_output_dir, CompareConfig, ExperimentConfig, ValidateOptions};

#[derive(Parser)]
#[command(name = "asymprox", version, about = "Asymptotic proximal point minimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of an experiment config and write traces plus summary.json.
    Run { config: PathBuf },
    /// Run a [left]/[right] config pair at equal budget and write the aligned table.
    Compare { config: PathBuf },
    /// Run the closed-form and oracle checks.
    Validate,
    /// Fit the squared-error decay rate of a trace file.
    FitRate {
        trace: PathBuf,
        /// Inclusive iteration window, e.g. 10:200.
        #[arg(long)]
        window: Option<String>,
    },
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {e}");
    ExitCode::from(harness::EXIT_CONFIG_ERROR as u8)
}

fn run(config: PathBuf) -> ExitCode {
    let exp = match ExperimentConfig::from_path(&config).and_then(|c| c.resolve()) {
        Ok(e) => e,
        Err(e) => return config_error(e),
    };
    let out = harness::output_dir(exp.output.as_deref(), default_output_dir(&exp));
    let summary = match harness::run_experiment(&exp, &out) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(harness::EXIT_RUN_FAILURE as u8);
        }
    };
    for s in &summary.seeds {
        match (&s.error, s.final_err_sq) {
            (Some(e), _) => println!("seed {:>4}: FAILED after {} records: {e}", s.seed, s.records),
            (None, Some(v)) => println!("seed {:>4}: final err_sq {v:.6e} ({} evaluations)", s.seed, s.eval_count),
            (None, None) => println!("seed {:>4}: no squared error", s.seed),
        }
    }
    if let Some(m) = summary.median_final_err_sq {
        println!("median final err_sq {m:.6e}");
    }
    if let (Some(t), Some(p)) = (summary.target_err_sq, summary.target_passed) {
        println!("target {t:e}: {}", if p { "met" } else { "not met" });
    }
    println!("wrote {}", out.display());
    if summary.any_failed() {
        ExitCode::from(harness::EXIT_RUN_FAILURE as u8)
    } else {
        ExitCode::SUCCESS
    }
}

fn compare(config: PathBuf) -> ExitCode {
    let cfg = match CompareConfig::from_path(&config) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    let (l, r) = match cfg.resolve() {
        Ok(p) => p,
        Err(e) => return config_error(e),
    };
    let out = harness::output_dir(cfg.output.as_deref(), PathBuf::from("asymprox_out/compare"));
    let outcome = match harness::compare(&l, &r, &out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(harness::EXIT_RUN_FAILURE as u8);
        }
    };
    let c = &outcome.comparison;
    let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6e}"));
    println!("budget {} evaluations", c.budget);
    println!("{} ({}): median final err_sq {}", c.left_label, c.left_solver, show(c.left_median_final));
    println!("{} ({}): median final err_sq {}", c.right_label, c.right_solver, show(c.right_median_final));
    println!("seed pairs won: {} {}, {} {}, of {}", c.left_label, c.left_pair_wins, c.right_label, c.right_pair_wins, c.pairs);
    println!("verdict: {}", c.verdict);
    println!("wrote {}", out.display());
    if outcome.left.any_failed() || outcome.right.any_failed() {
        ExitCode::from(harness::EXIT_RUN_FAILURE as u8)
    } else {
        ExitCode::SUCCESS
    }
}

fn validate() -> ExitCode {
    let report = harness::validate(&ValidateOptions::default());
    for c in &report.checks {
        println!(
            "{:<22} {} cases={:<4} max_error={:.3e}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.cases,
            c.max_error,
            c.detail
        );
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(harness::EXIT_VALIDATION_FAILURE as u8)
    }
}

fn fit_rate(trace: PathBuf, window: Option<String>) -> ExitCode {
    let window = match window.as_deref().map(harness::parse_window).transpose() {
        Ok(w) => w,
        Err(e) => return config_error(e),
    };
    let rows = match harness::read_trace(&trace) {
        Ok((_, rows)) => rows,
        Err(e) => return config_error(e),
    };
    match harness::fit_rate(&rows, window) {
        Ok(f) => {
            println!("rho_hat {:.6} r_squared {:.6} window {}:{} points {}", f.rho_hat, f.r_squared, f.window.0, f.window.1, f.points);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(harness::EXIT_RUN_FAILURE as u8)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => run(config),
        Command::Compare { config } => compare(config),
        Command::Validate => validate(),
        Command::FitRate { trace, window } => fit_rate(trace, window),
    }
}
