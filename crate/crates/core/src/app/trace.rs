use serde::{Deserialize, Serialize};

use super::AppParams;
use crate::baselines::DeConfig;

/// One row of a run: the state after `k` completed iterations (or
/// generations). `k = 0` is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub eval_count: u64,
    /// `|x - x*|^2`, present only when the minimizer is known.
    pub err_sq: Option<f64>,
    /// Running minimum of every evaluation so far (absent before the first).
    pub f_best: Option<f64>,
    /// Stable-variant normalizer used in iteration `k`.
    pub m_hat: Option<f64>,
    /// Sampling variance `rho^k / lambda` used in iteration `k`.
    pub sigma2: Option<f64>,
    pub wall_ms: f64,
    pub x: Vec<f64>,
}

impl TraceRecord {
    /// The part of the record that is written to trace files.
    pub fn row(&self) -> TraceRow {
        TraceRow {
            k: self.k,
            eval_count: self.eval_count,
            err_sq: self.err_sq,
            f_best: self.f_best,
            m_hat: self.m_hat,
            sigma2_k: self.sigma2,
            wall_ms: self.wall_ms,
        }
    }
}

/// Trace file row, in file column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub eval_count: u64,
    pub err_sq: Option<f64>,
    pub f_best: Option<f64>,
    pub m_hat: Option<f64>,
    pub sigma2_k: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum SolverParams {
    App(AppParams),
    De(DeConfig),
}

impl SolverParams {
    pub fn seed(&self) -> u64 {
        match self {
            SolverParams::App(p) => p.seed,
            SolverParams::De(c) => c.seed,
        }
    }

    /// `key = value` provenance lines describing the run configuration.
    pub fn provenance(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        match self {
            SolverParams::App(p) => {
                out.push(("solver".into(), p.variant.solver_name().into()));
                out.push(("lambda".into(), p.lambda.to_string()));
                out.push(("rho".into(), p.rho.to_string()));
                out.push(("n".into(), p.n.to_string()));
                out.push(("max_iters".into(), p.max_iters.to_string()));
                out.push(("sampler".into(), p.sampler.as_str().into()));
                out.push(("seed".into(), p.seed.to_string()));
            }
            SolverParams::De(c) => {
                out.push(("solver".into(), "de_rand_1_bin".into()));
                out.push(("population_size".into(), c.population_size.to_string()));
                out.push(("f".into(), c.f.to_string()));
                out.push(("cr".into(), c.cr.to_string()));
                out.push(("bounds".into(), format!("[{}, {}]", c.lo, c.hi)));
                out.push(("max_generations".into(), c.max_generations.to_string()));
                out.push(("seed".into(), c.seed.to_string()));
            }
        }
        out
    }
}

/// Ordered records of one run plus the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub objective: String,
    pub dim: usize,
    pub params: SolverParams,
    pub records: Vec<TraceRecord>,
    /// Best evaluated point so far, if any evaluation happened.
    pub x_best: Option<Vec<f64>>,
}

impl RunTrace {
    pub fn seed(&self) -> u64 {
        self.params.seed()
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("a trace always holds its initial record")
    }

    pub fn final_err_sq(&self) -> Option<f64> {
        self.last().err_sq
    }

    pub fn rows(&self) -> Vec<TraceRow> {
        self.records.iter().map(TraceRecord::row).collect()
    }

    /// Squared-error column, `None` if any record lacks it.
    pub fn err_sq_series(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.err_sq).collect()
    }
}
