//! Original and stable asymptotic proximal point (APP) iterations.
//!
//! Each iteration draws `n` points `theta_i ~ N(x_k, rho^k / lambda I_d)` and
//! moves to their exponentially weighted mean. The original method weights
//! by `exp(-rho^{-k} f(theta_i))`; the stable method weights by
//! `exp(-(f(theta_i) - f_best) / m_hat_k)` where `m_hat_k` is the root mean
//! square of the best-shifted batch values.

mod objective;
mod trace;
mod weights;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use objective::{EvalFn, ObjectiveSpec};
pub use trace::{RunTrace, SolverParams, TraceRecord, TraceRow};
pub use weights::{weighted_mean, weighted_mean_unshifted};

use crate::error::{Error, Result};
use crate::sampling::{gaussian_batch, SampleBatch, SamplerKind, SamplerStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Original weights, max-shifted before exponentiation.
    Original,
    /// Original weights taken literally; underflows once `rho^{-k} f` passes
    /// roughly 745.
    OriginalNaive,
    Stable,
}

impl Variant {
    pub fn solver_name(&self) -> &'static str {
        match self {
            Variant::Original => "app_original",
            Variant::OriginalNaive => "app_original_naive",
            Variant::Stable => "app_stable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppParams {
    pub lambda: f64,
    pub rho: f64,
    pub n: usize,
    pub variant: Variant,
    pub max_iters: usize,
    #[serde(default)]
    pub sampler: SamplerKind,
    pub seed: u64,
    /// Starting point; defaults to a uniform point on the sphere of radius
    /// `sqrt(d)` around the origin.
    #[serde(default)]
    pub initial_point: Option<Vec<f64>>,
}

impl AppParams {
    /// Parameters with `lambda = 1/sqrt(d)`, pseudo-random sampling and the
    /// default initial point.
    pub fn new(dim: usize, rho: f64, n: usize, variant: Variant, max_iters: usize, seed: u64) -> Self {
        Self {
            lambda: 1.0 / (dim as f64).sqrt(),
            rho,
            n,
            variant,
            max_iters,
            sampler: SamplerKind::PseudoRandom,
            seed,
            initial_point: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidParameter(format!("rho must lie in (0,1), got {}", self.rho)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        Ok(())
    }

    /// Sampling variance `rho^k / lambda`, recomputed from scratch.
    pub fn sigma2(&self, k: usize) -> f64 {
        self.rho.powi(k as i32) / self.lambda
    }
}

/// State at the start of iteration `k` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub k: usize,
    pub x: Vec<f64>,
    /// Running minimum `f*^c` of every evaluation; `+inf` before any.
    pub f_best: f64,
    pub x_best: Option<Vec<f64>>,
    /// `rho^k / lambda`, the variance for this iteration's batch.
    pub sigma2: f64,
    pub eval_count: u64,
    /// Normalizer used by the last stable step.
    pub last_m_hat: Option<f64>,
}

impl IterateState {
    pub fn initial(x1: Vec<f64>, params: &AppParams) -> Self {
        Self {
            k: 1,
            x: x1,
            f_best: f64::INFINITY,
            x_best: None,
            sigma2: params.sigma2(1),
            eval_count: 0,
            last_m_hat: None,
        }
    }

    fn advance(&self, params: &AppParams, x_next: Vec<f64>, batch_len: usize) -> Self {
        Self {
            k: self.k + 1,
            x: x_next,
            f_best: self.f_best,
            x_best: self.x_best.clone(),
            sigma2: params.sigma2(self.k + 1),
            eval_count: self.eval_count + batch_len as u64,
            last_m_hat: None,
        }
    }
}

fn evaluate(objective: &ObjectiveSpec, batch: &SampleBatch, k: usize) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if batch.dim() != objective.dim() {
        return Err(Error::DimensionMismatch { expected: objective.dim(), got: batch.dim() });
    }
    let values: Vec<f64> = batch.iter().map(|p| objective.eval(p)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteObjective { k });
    }
    Ok(values)
}

fn update_best(next: &mut IterateState, batch: &SampleBatch, values: &[f64]) {
    let (i_min, &f_min) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("batch is non-empty");
    if f_min < next.f_best {
        next.f_best = f_min;
        next.x_best = Some(batch.point(i_min).to_vec());
    }
}

fn batch_rows(batch: &SampleBatch) -> Vec<&[f64]> {
    batch.iter().collect()
}

/// One iteration of the original method: weights `exp(-rho^{-k} f(theta_i))`.
///
/// [`Variant::OriginalNaive`] evaluates those weights literally and fails with
/// [`Error::DegenerateWeights`] once all of them underflow; any other variant
/// uses the max-shifted form, which yields the same point.
pub fn app_step_original(
    state: &IterateState,
    objective: &ObjectiveSpec,
    params: &AppParams,
    batch: &SampleBatch,
) -> Result<IterateState> {
    let values = evaluate(objective, batch, state.k)?;
    let scale = params.rho.powi(-(state.k as i32));
    let exponents: Vec<f64> = values.iter().map(|f| -scale * f).collect();
    let rows = batch_rows(batch);
    let x_next = match params.variant {
        Variant::OriginalNaive => {
            weighted_mean_unshifted(&rows, &exponents)?.ok_or(Error::DegenerateWeights { k: state.k })?
        }
        _ => weighted_mean(&rows, &exponents)?,
    };
    let mut next = state.advance(params, x_next, batch.len());
    update_best(&mut next, batch, &values);
    Ok(next)
}

/// One iteration of the stable method.
///
/// When the batch is constant on the objective (`m_hat = 0`) the next
/// iterate is the plain batch mean and `m_hat` is recorded as 0.
pub fn app_step_stable(
    state: &IterateState,
    objective: &ObjectiveSpec,
    params: &AppParams,
    batch: &SampleBatch,
) -> Result<IterateState> {
    let values = evaluate(objective, batch, state.k)?;
    let mut next = state.advance(params, Vec::new(), batch.len());
    update_best(&mut next, batch, &values);
    let shifted: Vec<f64> = values.iter().map(|f| f - next.f_best).collect();
    let m_hat = root_mean_square(&shifted);
    let exponents: Vec<f64> = if m_hat > 0.0 {
        shifted.iter().map(|y| -y / m_hat).collect()
    } else {
        vec![0.0; shifted.len()]
    };
    next.x = weighted_mean(&batch_rows(batch), &exponents)?;
    next.last_m_hat = Some(m_hat);
    Ok(next)
}

/// `sqrt(mean(y^2))` computed with the largest magnitude factored out, so it
/// neither underflows for tiny values nor overflows for huge ones.
fn root_mean_square(y: &[f64]) -> f64 {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let mean_sq = y.iter().map(|v| (v / scale) * (v / scale)).sum::<f64>() / y.len() as f64;
    scale * mean_sq.sqrt()
}

/// Dispatches on `params.variant`.
pub fn app_step(
    state: &IterateState,
    objective: &ObjectiveSpec,
    params: &AppParams,
    batch: &SampleBatch,
) -> Result<IterateState> {
    match params.variant {
        Variant::Stable => app_step_stable(state, objective, params, batch),
        Variant::Original | Variant::OriginalNaive => app_step_original(state, objective, params, batch),
    }
}

/// Uniform point on the sphere of `radius` around the origin in `R^dim`.
pub fn sphere_point(dim: usize, radius: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // stream 0 feeds the pseudo-random sampler; keep the initializer apart
    rng.set_stream(1);
    loop {
        let z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            return z.into_iter().map(|v| v * radius / norm).collect();
        }
    }
}

/// A run that stopped on an error. `trace` holds everything recorded
/// before the failure; it is `None` when the configuration was rejected
/// up front.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub trace: Option<RunTrace>,
    pub error: Error,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.trace {
            Some(t) => write!(f, "{} (after {} records)", self.error, t.records.len()),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for RunFailure {}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure { trace: None, error }
    }
}

fn record(objective: &ObjectiveSpec, state: &IterateState, k: usize, params: &AppParams, started: Instant) -> TraceRecord {
    TraceRecord {
        k,
        eval_count: state.eval_count,
        err_sq: objective.sq_error(&state.x),
        f_best: state.f_best.is_finite().then_some(state.f_best),
        m_hat: state.last_m_hat,
        sigma2: (k > 0).then(|| params.sigma2(k)),
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        x: state.x.clone(),
    }
}

/// Runs `params.max_iters` iterations from the configured starting point,
/// drawing every batch from one sampler stream seeded with `params.seed`.
pub fn run(objective: &ObjectiveSpec, params: &AppParams) -> std::result::Result<RunTrace, RunFailure> {
    params.validate()?;
    let d = objective.dim();
    let x1 = match &params.initial_point {
        Some(p) if p.len() != d => return Err(Error::DimensionMismatch { expected: d, got: p.len() }.into()),
        Some(p) => p.clone(),
        None => sphere_point(d, (d as f64).sqrt(), params.seed),
    };
    let mut stream = SamplerStream::new(params.sampler, params.seed, d)?;
    let started = Instant::now();
    let mut state = IterateState::initial(x1, params);
    let mut trace = RunTrace {
        objective: objective.name().to_string(),
        dim: d,
        params: SolverParams::App(params.clone()),
        records: vec![record(objective, &state, 0, params, started)],
        x_best: None,
    };
    for _ in 0..params.max_iters {
        let k = state.k;
        let step = gaussian_batch(&mut stream, &state.x, params.sigma2(k), params.n)
            .and_then(|batch| app_step(&state, objective, params, &batch));
        match step {
            Ok(next) => {
                state = next;
                trace.records.push(record(objective, &state, k, params, started));
                trace.x_best = state.x_best.clone();
            }
            Err(error) => return Err(RunFailure { trace: Some(trace), error }),
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives;
    use approx::assert_abs_diff_eq;

    fn square_1d() -> ObjectiveSpec {
        ObjectiveSpec::new("square", 1, |x: &[f64]| x[0] * x[0])
            .unwrap()
            .with_minimizer(vec![0.0], 0.0)
            .unwrap()
    }

    fn params(variant: Variant) -> AppParams {
        AppParams { lambda: 1.0, rho: 0.5, n: 2, variant, max_iters: 1, sampler: SamplerKind::PseudoRandom, seed: 0, initial_point: None }
    }

    #[test]
    fn single_sample_is_returned() {
        let f = square_1d();
        let p = AppParams { n: 1, ..params(Variant::Original) };
        let st = IterateState::initial(vec![0.3], &p);
        let b = SampleBatch::from_points(vec![vec![0.77]]).unwrap();
        for v in [Variant::Original, Variant::OriginalNaive, Variant::Stable] {
            let p = AppParams { variant: v, ..p.clone() };
            assert_eq!(app_step(&st, &f, &p, &b).unwrap().x, vec![0.77]);
        }
    }

    #[test]
    fn constant_objective_gives_batch_mean() {
        let f = ObjectiveSpec::new("c", 2, |_: &[f64]| 3.0).unwrap();
        let p = params(Variant::Stable);
        let st = IterateState::initial(vec![0.0, 0.0], &p);
        let b = SampleBatch::from_points(vec![vec![1.0, 2.0], vec![3.0, 0.0], vec![-1.0, 1.0]]).unwrap();
        for v in [Variant::Original, Variant::Stable] {
            let p = AppParams { variant: v, ..p.clone() };
            let next = app_step(&st, &f, &p, &b).unwrap();
            assert_abs_diff_eq!(next.x[0], 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(next.x[1], 1.0, epsilon = 1e-15);
        }
        let next = app_step_stable(&st, &f, &p, &b).unwrap();
        assert_eq!(next.last_m_hat, Some(0.0));
    }

    #[test]
    fn original_two_point_example() {
        // rho^{-k} = 1 requires k = 0 scaling; emulate with rho^{-1} and f scaled by rho
        let rho = 0.5;
        let f = ObjectiveSpec::new("sq", 1, move |x: &[f64]| rho * x[0] * x[0]).unwrap();
        let p = AppParams { rho, ..params(Variant::Original) };
        let st = IterateState::initial(vec![0.5], &p);
        let b = SampleBatch::from_points(vec![vec![0.0], vec![1.0]]).unwrap();
        let next = app_step_original(&st, &f, &p, &b).unwrap();
        let e = (-1.0f64).exp();
        assert_abs_diff_eq!(next.x[0], e / (1.0 + e), epsilon = 1e-15);
        assert_eq!(next.k, 2);
        assert_eq!(next.eval_count, 2);
        assert_eq!(next.f_best, 0.0);
    }

    #[test]
    fn stable_two_point_example() {
        let f = square_1d();
        let p = params(Variant::Stable);
        let st = IterateState::initial(vec![0.5], &p);
        let b = SampleBatch::from_points(vec![vec![0.0], vec![1.0]]).unwrap();
        let next = app_step_stable(&st, &f, &p, &b).unwrap();
        assert_eq!(next.f_best, 0.0);
        let m = next.last_m_hat.unwrap();
        assert_abs_diff_eq!(m, 0.5f64.sqrt(), epsilon = 1e-15);
        let w = (-(2.0f64).sqrt()).exp();
        assert_abs_diff_eq!(next.x[0], w / (1.0 + w), epsilon = 1e-15);
        assert_abs_diff_eq!(next.x[0], 0.19557, epsilon = 1e-5);
    }

    #[test]
    fn symmetric_batch_gives_midpoint() {
        let f = square_1d();
        let p = params(Variant::Stable);
        let st = IterateState::initial(vec![0.0], &p);
        let b = SampleBatch::from_points(vec![vec![-0.4], vec![0.4], vec![-1.2], vec![1.2]]).unwrap();
        assert_eq!(app_step_stable(&st, &f, &p, &b).unwrap().x, vec![0.0]);
    }

    #[test]
    fn naive_underflow_is_reported_with_k() {
        let f = ObjectiveSpec::new("one", 1, |x: &[f64]| 1.0 + x[0] * x[0]).unwrap();
        let p = AppParams { rho: 0.9, ..params(Variant::OriginalNaive) };
        let b = SampleBatch::from_points(vec![vec![0.0], vec![0.01]]).unwrap();
        let mut st = IterateState::initial(vec![0.0], &p);
        st.k = 63;
        assert_eq!(app_step_original(&st, &f, &p, &b), Err(Error::DegenerateWeights { k: 63 }));
        st.k = 62;
        assert!(app_step_original(&st, &f, &p, &b).is_ok());
        // the shifted form keeps going
        let shifted = AppParams { variant: Variant::Original, ..p };
        st.k = 63;
        assert!(app_step_original(&st, &f, &shifted, &b).is_ok());
    }

    #[test]
    fn naive_underflow_threshold_matches_double_range() {
        // exp(-0.9^{-62.29}) is the smallest normal double
        let v = (-(0.9f64).powf(-62.29)).exp();
        assert!((v / 2.38389e-308 - 1.0).abs() < 1e-3, "{v:e}");
        assert!((-(0.9f64).powi(-63)).exp() == 0.0);
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let f = ObjectiveSpec::new("nan", 1, |_: &[f64]| f64::NAN).unwrap();
        let p = params(Variant::Stable);
        let st = IterateState::initial(vec![0.0], &p);
        let b = SampleBatch::from_points(vec![vec![0.0]]).unwrap();
        assert_eq!(app_step(&st, &f, &p, &b), Err(Error::NonFiniteObjective { k: 1 }));
    }

    #[test]
    fn zero_iterations_gives_initial_record_only() {
        let f = objectives::by_name("sphere", 2).unwrap();
        let p = AppParams::new(2, 0.9, 10, Variant::Stable, 0, 1);
        let t = run(&f, &p).unwrap();
        assert_eq!(t.records.len(), 1);
        let r = &t.records[0];
        assert_eq!((r.k, r.eval_count), (0, 0));
        assert_eq!(r.f_best, None);
        assert_eq!(r.sigma2, None);
        assert_abs_diff_eq!(r.err_sq.unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn run_bookkeeping() {
        let f = objectives::by_name("sphere", 3).unwrap();
        let p = AppParams::new(3, 0.8, 7, Variant::Stable, 25, 9);
        let t = run(&f, &p).unwrap();
        assert_eq!(t.records.len(), 26);
        for (i, r) in t.records.iter().enumerate() {
            assert_eq!(r.k, i);
            assert_eq!(r.eval_count, 7 * i as u64);
            if i > 0 {
                assert_eq!(r.sigma2.unwrap(), 0.8f64.powi(i as i32) / p.lambda);
                assert!(r.m_hat.is_some());
            }
        }
        for w in t.records.windows(2).skip(1) {
            assert!(w[1].f_best.unwrap() <= w[0].f_best.unwrap());
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let f = objectives::by_name("sphere", 2).unwrap();
        for bad in [
            AppParams { rho: 1.0, ..AppParams::new(2, 0.9, 10, Variant::Stable, 3, 0) },
            AppParams { rho: 0.0, ..AppParams::new(2, 0.9, 10, Variant::Stable, 3, 0) },
            AppParams { lambda: 0.0, ..AppParams::new(2, 0.9, 10, Variant::Stable, 3, 0) },
            AppParams { n: 0, ..AppParams::new(2, 0.9, 10, Variant::Stable, 3, 0) },
            AppParams { initial_point: Some(vec![1.0]), ..AppParams::new(2, 0.9, 10, Variant::Stable, 3, 0) },
        ] {
            assert!(run(&f, &bad).is_err());
        }
    }
}
