//! Side-by-side runs of two experiment configurations at equal budget.
//!
//! ```toml
//! output = "runs/rr50"        # optional
//!
//! [left]                      # a full experiment config
//! objective = { name = "revised_rastrigin", dim = 50 }
//! solver = { name = "app_stable", rho = 0.95, n = 400, sampler = "scrambled_halton" }
//! run = { max_iters = 500, n_seeds = 10 }
//!
//! [right]
//! objective = { name = "revised_rastrigin", dim = 50 }
//! solver = { name = "de_rand_1_bin" }
//! run = { max_iters = 999, n_seeds = 10 }
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Experiment, ExperimentConfig};
use super::experiment::{run_seeds, write_outputs, SeedRun, Summary};
use super::median;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub output: Option<PathBuf>,
    pub left: ExperimentConfig,
    pub right: ExperimentConfig,
}

impl CompareConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Resolves both sides and checks that they are comparable.
    pub fn resolve(&self) -> Result<(Experiment, Experiment)> {
        let l = self.left.resolve()?;
        let r = self.right.resolve()?;
        let key = |e: &Experiment| format!("{} d={}", e.objective.name(), e.objective.dim());
        if key(&l) != key(&r) {
            return Err(Error::MismatchedObjectives(key(&l), key(&r)));
        }
        if l.solver.budget() != r.solver.budget() {
            return Err(Error::Config(format!(
                "evaluation budgets differ: left {} vs right {}",
                l.solver.budget(),
                r.solver.budget()
            )));
        }
        Ok((l, r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub eval_count: u64,
    pub left_median_err_sq: Option<f64>,
    pub right_median_err_sq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub left_solver: String,
    pub right_solver: String,
    pub left_label: String,
    pub right_label: String,
    pub budget: u64,
    pub rows: Vec<ComparisonRow>,
    pub left_median_final: Option<f64>,
    pub right_median_final: Option<f64>,
    /// `tie`, or the label of the side with the lower median final error.
    pub verdict: String,
    /// Seed pairs (i-th seed of each side) won by each side; ties count
    /// for neither.
    pub left_pair_wins: usize,
    pub right_pair_wins: usize,
    pub pairs: usize,
}

fn labels(l: &Experiment, r: &Experiment) -> (String, String) {
    if l.solver.family() != r.solver.family() {
        (l.solver.family().into(), r.solver.family().into())
    } else {
        ("left".into(), "right".into())
    }
}

/// Error of a run at `eval_count`: the last record at or below it.
fn err_at(run: &SeedRun, eval_count: u64) -> Option<f64> {
    let t = run.trace.as_ref()?;
    t.records.iter().take_while(|r| r.eval_count <= eval_count).last().and_then(|r| r.err_sq)
}

fn median_at(runs: &[SeedRun], eval_count: u64) -> Option<f64> {
    let vals: Vec<f64> = runs.iter().filter_map(|r| err_at(r, eval_count)).collect();
    median(&vals)
}

/// Aligns two sets of runs on the union of their evaluation counts.
pub fn compare_runs(l: &Experiment, r: &Experiment, left: &[SeedRun], right: &[SeedRun]) -> Comparison {
    let counts: BTreeSet<u64> = left
        .iter()
        .chain(right)
        .filter_map(|run| run.trace.as_ref())
        .flat_map(|t| t.records.iter().map(|rec| rec.eval_count))
        .collect();
    let rows = counts
        .into_iter()
        .map(|e| ComparisonRow { eval_count: e, left_median_err_sq: median_at(left, e), right_median_err_sq: median_at(right, e) })
        .collect();
    let finals = |runs: &[SeedRun]| runs.iter().filter_map(SeedRun::final_err_sq).collect::<Vec<_>>();
    let (lm, rm) = (median(&finals(left)), median(&finals(right)));
    let (left_label, right_label) = labels(l, r);
    let verdict = match (lm, rm) {
        (Some(a), Some(b)) if a < b => left_label.clone(),
        (Some(a), Some(b)) if b < a => right_label.clone(),
        (Some(_), None) => left_label.clone(),
        (None, Some(_)) => right_label.clone(),
        _ => "tie".to_string(),
    };
    let mut wins = (0, 0);
    for (a, b) in left.iter().zip(right) {
        match (a.final_err_sq(), b.final_err_sq()) {
            (Some(x), Some(y)) if x < y => wins.0 += 1,
            (Some(x), Some(y)) if y < x => wins.1 += 1,
            (Some(_), None) => wins.0 += 1,
            (None, Some(_)) => wins.1 += 1,
            _ => {}
        }
    }
    Comparison {
        left_solver: l.solver.name().into(),
        right_solver: r.solver.name().into(),
        left_label,
        right_label,
        budget: l.solver.budget(),
        rows,
        left_median_final: lm,
        right_median_final: rm,
        verdict,
        left_pair_wins: wins.0,
        right_pair_wins: wins.1,
        pairs: left.len().min(right.len()),
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub comparison: Comparison,
    pub left: Summary,
    pub right: Summary,
}

/// Runs both sides, writing their traces under `left/` and `right/` and
/// the aligned table as `comparison.csv` plus `comparison.json`.
pub fn compare(l: &Experiment, r: &Experiment, out_dir: &Path) -> Result<CompareOutcome> {
    let (left_runs, right_runs) = rayon::join(|| run_seeds(l), || run_seeds(r));
    let left = write_outputs(l, &left_runs, &out_dir.join("left"))?;
    let right = write_outputs(r, &right_runs, &out_dir.join("right"))?;
    let comparison = compare_runs(l, r, &left_runs, &right_runs);
    let mut w = csv::Writer::from_path(out_dir.join("comparison.csv"))?;
    w.write_record([
        "eval_count".to_string(),
        format!("{}_median_err_sq", comparison.left_label),
        format!("{}_median_err_sq", comparison.right_label),
    ])?;
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &comparison.rows {
        w.write_record([row.eval_count.to_string(), cell(row.left_median_err_sq), cell(row.right_median_err_sq)])?;
    }
    w.flush()?;
    let json = serde_json::to_string_pretty(&comparison).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(out_dir.join("comparison.json"), json + "\n")?;
    Ok(CompareOutcome { comparison, left, right })
}
