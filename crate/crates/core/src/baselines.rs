//! DE/rand/1/bin differential evolution on a hypercube, used as the
//! comparison baseline.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::app::{ObjectiveSpec, RunFailure, RunTrace, SolverParams, TraceRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub population_size: usize,
    /// Differential weight.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
    pub lo: f64,
    pub hi: f64,
    pub max_generations: usize,
    pub seed: u64,
}

impl DeConfig {
    /// `F = 0.5`, `CR = 0.9`, `NP = 10 d` capped at 200, domain `[-1, 1]^d`.
    pub fn with_defaults(dim: usize, max_generations: usize, seed: u64) -> Self {
        Self {
            population_size: (10 * dim).clamp(4, 200),
            f: 0.5,
            cr: 0.9,
            lo: -1.0,
            hi: 1.0,
            max_generations,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::PopulationTooSmall(self.population_size));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidParameter(format!("CR must lie in [0,1], got {}", self.cr)));
        }
        if !self.f.is_finite() {
            return Err(Error::InvalidParameter("F must be finite".into()));
        }
        if !(self.lo < self.hi) {
            return Err(Error::InvalidParameter(format!("empty bounds [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    /// Total evaluations of a full run: the initial population plus one
    /// trial per member per generation.
    pub fn budget(&self) -> u64 {
        (self.population_size * (self.max_generations + 1)) as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub generation: usize,
    pub eval_count: u64,
}

impl Population {
    /// Uniform initialization in `[lo, hi]^d`.
    pub fn random<R: Rng>(objective: &ObjectiveSpec, config: &DeConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let members: Vec<Vec<f64>> = (0..config.population_size)
            .map(|_| (0..objective.dim()).map(|_| rng.random_range(config.lo..=config.hi)).collect())
            .collect();
        Self::from_members(objective, members)
    }

    pub fn from_members(objective: &ObjectiveSpec, members: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(m) = members.iter().find(|m| m.len() != objective.dim()) {
            return Err(Error::DimensionMismatch { expected: objective.dim(), got: m.len() });
        }
        let fitness: Vec<f64> = members.iter().map(|m| objective.eval(m)).collect();
        let eval_count = members.len() as u64;
        Ok(Self { members, fitness, generation: 0, eval_count })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> (usize, f64) {
        self.fitness
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("population is non-empty")
    }
}

/// Three distinct indices, all different from `target`.
pub fn pick_donors<R: Rng>(np: usize, target: usize, rng: &mut R) -> [usize; 3] {
    let mut out = [usize::MAX; 3];
    let mut filled = 0;
    while filled < 3 {
        let r = rng.random_range(0..np);
        if r != target && !out[..filled].contains(&r) {
            out[filled] = r;
            filled += 1;
        }
    }
    out
}

/// Mutant `x_r1 + F (x_r2 - x_r3)` crossed binomially with the target.
/// Coordinate `j_rand` always comes from the mutant; out-of-bounds
/// coordinates are clipped to the box.
pub fn trial_vector<R: Rng>(
    pop: &Population,
    target: usize,
    donors: [usize; 3],
    j_rand: usize,
    config: &DeConfig,
    rng: &mut R,
) -> Vec<f64> {
    let [r1, r2, r3] = donors;
    let (base, a, b) = (&pop.members[r1], &pop.members[r2], &pop.members[r3]);
    pop.members[target]
        .iter()
        .enumerate()
        .map(|(j, &xt)| {
            let take_mutant = j == j_rand || rng.random::<f64>() < config.cr;
            let v = if take_mutant { base[j] + config.f * (a[j] - b[j]) } else { xt };
            v.clamp(config.lo, config.hi)
        })
        .collect()
}

/// One synchronous generation: every trial is built from the current
/// population, then greedy selection replaces targets whose trial is no
/// worse.
pub fn de_step<R: Rng>(pop: &Population, objective: &ObjectiveSpec, config: &DeConfig, rng: &mut R) -> Result<Population> {
    config.validate()?;
    if pop.len() < 4 {
        return Err(Error::PopulationTooSmall(pop.len()));
    }
    let d = objective.dim();
    let trials: Vec<Vec<f64>> = (0..pop.len())
        .map(|i| {
            let donors = pick_donors(pop.len(), i, rng);
            let j_rand = rng.random_range(0..d);
            trial_vector(pop, i, donors, j_rand, config, rng)
        })
        .collect();
    Ok(select(pop, objective, trials))
}

/// Greedy one-to-one selection of `trials` against the current members.
pub fn select(pop: &Population, objective: &ObjectiveSpec, trials: Vec<Vec<f64>>) -> Population {
    let mut next = pop.clone();
    for (i, trial) in trials.into_iter().enumerate() {
        let ft = objective.eval(&trial);
        if ft <= pop.fitness[i] {
            next.members[i] = trial;
            next.fitness[i] = ft;
        }
    }
    next.eval_count += pop.len() as u64;
    next.generation += 1;
    next
}

fn record(objective: &ObjectiveSpec, pop: &Population, started: Instant) -> TraceRecord {
    let (i, f) = pop.best();
    let x = pop.members[i].clone();
    TraceRecord {
        k: pop.generation,
        eval_count: pop.eval_count,
        err_sq: objective.sq_error(&x),
        f_best: Some(f),
        m_hat: None,
        sigma2: None,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        x,
    }
}

/// Full DE run; record `g` describes the best member after generation `g`.
pub fn de_run(objective: &ObjectiveSpec, config: &DeConfig) -> std::result::Result<RunTrace, RunFailure> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let started = Instant::now();
    let mut pop = Population::random(objective, config, &mut rng)?;
    let mut trace = RunTrace {
        objective: objective.name().to_string(),
        dim: objective.dim(),
        params: SolverParams::De(config.clone()),
        records: vec![record(objective, &pop, started)],
        x_best: None,
    };
    for _ in 0..config.max_generations {
        match de_step(&pop, objective, config, &mut rng) {
            Ok(next) => pop = next,
            Err(error) => return Err(RunFailure { trace: Some(trace), error }),
        }
        trace.records.push(record(objective, &pop, started));
    }
    trace.x_best = Some(trace.last().x.clone());
    Ok(trace)
}
