use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Experiment, SolverChoice};
use super::trace_io::{read_trace, write_trace};
use super::median;
use crate::app::{self, RunFailure, RunTrace};
use crate::baselines::{de_run, DeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub ok: bool,
    pub error: Option<String>,
    pub trace_file: String,
    pub records: usize,
    pub eval_count: u64,
    pub final_err_sq: Option<f64>,
    pub final_f_best: Option<f64>,
    pub target_met: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub objective: String,
    pub dim: usize,
    pub solver: String,
    pub budget: u64,
    pub target_err_sq: Option<f64>,
    pub seeds: Vec<SeedSummary>,
    pub failed_seeds: usize,
    /// Median final squared error over the seeds that completed.
    pub median_final_err_sq: Option<f64>,
    /// Whether the median meets the target; `None` without a target.
    pub target_passed: Option<bool>,
}

impl Summary {
    pub fn any_failed(&self) -> bool {
        self.failed_seeds > 0
    }
}

/// In-memory result of one seed, before anything is written.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: u64,
    pub trace: Option<RunTrace>,
    pub error: Option<crate::Error>,
}

impl SeedRun {
    pub fn final_err_sq(&self) -> Option<f64> {
        match (&self.trace, &self.error) {
            (Some(t), None) => t.final_err_sq(),
            _ => None,
        }
    }
}

/// Runs one seed of `exp`, truncating the trace at the first record that
/// meets the target error.
pub fn run_seed(exp: &Experiment, seed: u64) -> SeedRun {
    let result: std::result::Result<RunTrace, RunFailure> = match &exp.solver {
        SolverChoice::App(p) => {
            let mut p = p.clone();
            p.seed = seed;
            p.initial_point = Some(exp.initializer.point(exp.objective.dim(), seed));
            app::run(&exp.objective, &p)
        }
        SolverChoice::De(c) => de_run(&exp.objective, &DeConfig { seed, ..c.clone() }),
    };
    let (mut trace, error) = match result {
        Ok(t) => (Some(t), None),
        Err(f) => (f.trace, Some(f.error)),
    };
    if let (Some(t), Some(target)) = (trace.as_mut(), exp.target_err_sq) {
        if let Some(i) = t.records.iter().position(|r| r.err_sq.is_some_and(|e| e <= target)) {
            t.records.truncate(i + 1);
        }
    }
    SeedRun { seed, trace, error }
}

/// Runs every seed in parallel, in seed order.
pub fn run_seeds(exp: &Experiment) -> Vec<SeedRun> {
    exp.seeds.par_iter().map(|&s| run_seed(exp, s)).collect()
}

pub fn trace_file_name(seed: u64, ok: bool) -> String {
    if ok {
        format!("trace_seed{seed}.csv")
    } else {
        format!("partial_trace_seed{seed}.csv")
    }
}

fn provenance(exp: &Experiment, trace: &RunTrace) -> Vec<(String, String)> {
    let mut p = vec![
        ("objective".to_string(), exp.objective.name().to_string()),
        ("dim".to_string(), exp.objective.dim().to_string()),
    ];
    p.extend(trace.params.provenance());
    let init = match &exp.solver {
        SolverChoice::App(_) => exp.initializer.describe(),
        SolverChoice::De(c) => format!("uniform in [{}, {}]^d", c.lo, c.hi),
    };
    p.push(("init".into(), init));
    if let Some(t) = exp.target_err_sq {
        p.push(("target_err_sq".into(), t.to_string()));
    }
    p.push(("err_sq".into(), "squared distance to the known minimizer".into()));
    p
}

/// Writes one trace per seed into `out_dir` plus `summary.json`.
pub fn write_outputs(exp: &Experiment, runs: &[SeedRun], out_dir: &Path) -> Result<Summary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let seeds = runs
        .par_iter()
        .map(|r| {
            let ok = r.error.is_none();
            let file = trace_file_name(r.seed, ok);
            let (records, eval_count, final_f_best) = match &r.trace {
                Some(t) => {
                    write_trace(&out_dir.join(&file), &provenance(exp, t), &t.rows())?;
                    (t.records.len(), t.last().eval_count, t.last().f_best)
                }
                None => (0, 0, None),
            };
            let final_err_sq = r.final_err_sq();
            Ok(SeedSummary {
                seed: r.seed,
                ok,
                error: r.error.as_ref().map(|e| e.to_string()),
                trace_file: if r.trace.is_some() { file } else { String::new() },
                records,
                eval_count,
                final_err_sq,
                final_f_best: if ok { final_f_best } else { None },
                target_met: exp.target_err_sq.map(|t| final_err_sq.is_some_and(|e| e <= t)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let finals: Vec<f64> = seeds.iter().filter_map(|s| s.final_err_sq).collect();
    let median_final_err_sq = median(&finals);
    let summary = Summary {
        objective: exp.objective.name().to_string(),
        dim: exp.objective.dim(),
        solver: exp.solver.name().to_string(),
        budget: exp.solver.budget(),
        target_err_sq: exp.target_err_sq,
        failed_seeds: seeds.iter().filter(|s| !s.ok).count(),
        target_passed: exp.target_err_sq.map(|t| median_final_err_sq.is_some_and(|m| m <= t)),
        median_final_err_sq,
        seeds,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(out_dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

pub fn run_experiment(exp: &Experiment, out_dir: &Path) -> Result<Summary> {
    let runs = run_seeds(exp);
    write_outputs(exp, &runs, out_dir)
}

/// Median of the final squared errors stored in the trace files listed by
/// a summary, read back from disk.
pub fn median_from_files(out_dir: &Path, summary: &Summary) -> Result<Option<f64>> {
    let mut finals = Vec::new();
    for s in summary.seeds.iter().filter(|s| s.ok) {
        let (_, rows) = read_trace(&out_dir.join(&s.trace_file))?;
        if let Some(e) = rows.last().and_then(|r| r.err_sq) {
            finals.push(e);
        }
    }
    Ok(median(&finals))
}

pub fn read_summary(out_dir: &Path) -> Result<Summary> {
    let text = std::fs::read_to_string(out_dir.join("summary.json"))?;
    serde_json::from_str(&text).map_err(|e| Error::TraceFormat(e.to_string()))
}

pub fn default_output_dir(exp: &Experiment) -> PathBuf {
    PathBuf::from(format!("asymprox_out/{}_{}", exp.objective.name(), exp.solver.name()))
}
