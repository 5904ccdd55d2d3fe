//! TOML experiment configuration.
//!
//! ```toml
//! [objective]
//! name = "revised_rastrigin"
//! dim = 2
//!
//! [solver]
//! name = "app_stable"        # app_original | app_original_naive | app_stable | de_rand_1_bin
//! rho = 0.9                  # required for APP solvers
//! n = 100                    # required for APP solvers
//! # lambda = 0.7071          # default 1/sqrt(dim)
//! # sampler = "scrambled_halton"
//!
//! [de]                       # optional, DE only
//! # population_size = 20     # default 10*dim capped at 200
//! # f = 0.5
//! # cr = 0.9
//! # lo = -1.0
//! # hi = 1.0
//!
//! [run]
//! max_iters = 300            # iterations, or generations for DE
//! # seed = 0                 # first seed; seeds run seed..seed+n_seeds
//! # n_seeds = 1
//! # target_err_sq = 1e-6
//! # init_radius = 1.4142     # default sqrt(dim)
//! # initial_point = [1.0, -1.0]
//! # output = "runs/rr2"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::app::{sphere_point, AppParams, ObjectiveSpec, Variant};
use crate::baselines::DeConfig;
use crate::error::{Error, Result};
use crate::objectives;
use crate::sampling::SamplerKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSection {
    pub name: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub name: String,
    pub rho: Option<f64>,
    pub n: Option<usize>,
    pub lambda: Option<f64>,
    pub sampler: Option<SamplerKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeSection {
    pub population_size: Option<usize>,
    pub f: Option<f64>,
    pub cr: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub max_iters: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub n_seeds: usize,
    pub target_err_sq: Option<f64>,
    pub init_radius: Option<f64>,
    pub initial_point: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: ObjectiveSection,
    pub solver: SolverSection,
    #[serde(default)]
    pub de: DeSection,
    pub run: RunSection,
}

/// Starting point rule for APP runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Initializer {
    Sphere { radius: f64 },
    Explicit(Vec<f64>),
}

impl Initializer {
    pub fn point(&self, dim: usize, seed: u64) -> Vec<f64> {
        match self {
            Initializer::Sphere { radius } => sphere_point(dim, *radius, seed),
            Initializer::Explicit(p) => p.clone(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Initializer::Sphere { radius } => format!("sphere radius {radius}"),
            Initializer::Explicit(p) => format!("explicit {p:?}"),
        }
    }
}

/// Solver template; the seed is filled in per run.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    App(AppParams),
    De(DeConfig),
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::App(p) => p.variant.solver_name(),
            SolverChoice::De(_) => "de_rand_1_bin",
        }
    }

    /// Solver family label used in comparison verdicts.
    pub fn family(&self) -> &'static str {
        match self {
            SolverChoice::App(_) => "app",
            SolverChoice::De(_) => "de",
        }
    }

    /// Total objective evaluations of one full run.
    pub fn budget(&self) -> u64 {
        match self {
            SolverChoice::App(p) => (p.n * p.max_iters) as u64,
            SolverChoice::De(c) => c.budget(),
        }
    }
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub objective: ObjectiveSpec,
    pub solver: SolverChoice,
    pub seeds: Vec<u64>,
    pub initializer: Initializer,
    pub target_err_sq: Option<f64>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Resolves names and defaults and checks every parameter.
    pub fn resolve(&self) -> Result<Experiment> {
        let d = self.objective.dim;
        let objective = objectives::by_name(&self.objective.name, d)?;
        if self.run.n_seeds == 0 {
            return Err(Error::Config("n_seeds must be at least 1".into()));
        }
        let seeds: Vec<u64> = (0..self.run.n_seeds as u64).map(|i| self.run.seed + i).collect();
        let initializer = match (&self.run.initial_point, self.run.init_radius) {
            (Some(_), Some(_)) => return Err(Error::Config("give either initial_point or init_radius, not both".into())),
            (Some(p), None) if p.len() != d => return Err(Error::DimensionMismatch { expected: d, got: p.len() }),
            (Some(p), None) => Initializer::Explicit(p.clone()),
            (None, Some(r)) if !(r >= 0.0 && r.is_finite()) => {
                return Err(Error::Config(format!("init_radius must be nonnegative, got {r}")))
            }
            (None, Some(r)) => Initializer::Sphere { radius: r },
            (None, None) => Initializer::Sphere { radius: (d as f64).sqrt() },
        };
        if let Some(t) = self.run.target_err_sq {
            if !(t >= 0.0) {
                return Err(Error::Config(format!("target_err_sq must be nonnegative, got {t}")));
            }
        }
        let s = &self.solver;
        let solver = match s.name.as_str() {
            "app_original" | "app_original_naive" | "app_stable" => {
                let variant = match s.name.as_str() {
                    "app_original" => Variant::Original,
                    "app_original_naive" => Variant::OriginalNaive,
                    _ => Variant::Stable,
                };
                let rho = s.rho.ok_or_else(|| Error::Config("solver.rho is required for APP solvers".into()))?;
                let n = s.n.ok_or_else(|| Error::Config("solver.n is required for APP solvers".into()))?;
                let mut p = AppParams::new(d, rho, n, variant, self.run.max_iters, self.run.seed);
                if let Some(l) = s.lambda {
                    p.lambda = l;
                }
                p.sampler = s.sampler.unwrap_or_default();
                p.validate().map_err(|e| Error::Config(e.to_string()))?;
                SolverChoice::App(p)
            }
            "de_rand_1_bin" => {
                if s.rho.is_some() || s.n.is_some() || s.lambda.is_some() || s.sampler.is_some() {
                    return Err(Error::Config("rho, n, lambda and sampler apply to APP solvers only".into()));
                }
                let base = DeConfig::with_defaults(d, self.run.max_iters, self.run.seed);
                let c = DeConfig {
                    population_size: self.de.population_size.unwrap_or(base.population_size),
                    f: self.de.f.unwrap_or(base.f),
                    cr: self.de.cr.unwrap_or(base.cr),
                    lo: self.de.lo.unwrap_or(base.lo),
                    hi: self.de.hi.unwrap_or(base.hi),
                    ..base
                };
                c.validate().map_err(|e| Error::Config(e.to_string()))?;
                SolverChoice::De(c)
            }
            other => return Err(Error::Config(format!("unknown solver {other:?}"))),
        };
        Ok(Experiment {
            objective,
            solver,
            seeds,
            initializer,
            target_err_sq: self.run.target_err_sq,
            output: self.run.output.clone(),
        })
    }
}
