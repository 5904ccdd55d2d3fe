//! Closed-form oracles and numerical diagnostics: Gaussian integrals,
//! proximal-point limits, parameter conditions and normalizer envelopes.
//!
//! The `*_check` functions bundle these into self-contained suites that
//! report a pass/fail verdict with the largest observed error.

pub mod conditions;
pub mod gaussian;
pub mod proximal;
pub mod quadrature;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use conditions::{mk_bounds, mk_monte_carlo, n_lower_bound, rho_lambda, ConvergenceEnvelope, EnvelopeReport};
pub use gaussian::{gaussian_integral_i1, gaussian_integral_i2, gaussian_integrals_by_quadrature, GaussianIntegralParams};
pub use proximal::{
    alpha_sweep, asymptotic_ratio_estimate, doubling_alphas, proximal_point_bruteforce, uk_diagnostic, AlphaSweep,
    UkDiagnostic,
};
pub use quadrature::QuadratureConfig;

use crate::error::Result;
use crate::objectives;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// Largest error seen across cases, in the check's own units.
    pub max_error: f64,
    pub detail: String,
}

pub type IntegralFn = fn(&GaussianIntegralParams) -> Result<f64>;

/// Random integrable parameter sets: mostly `alpha, beta, gamma > 0`, with
/// some negative `beta` or `gamma` and some all-negative sets.
pub fn random_integral_params(d: usize, count: usize, seed: u64) -> Vec<GaussianIntegralParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let alpha = rng.random_range(0.2..3.0);
        let beta = rng.random_range(-0.8..3.0);
        let gamma = rng.random_range(-0.8..3.0);
        if beta + gamma < 0.2 {
            continue;
        }
        let sign = if out.len() % 5 == 4 { -1.0 } else { 1.0 };
        let u = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
        let v = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
        out.push(GaussianIntegralParams::new(sign * alpha, sign * beta, sign * gamma, u, v).expect("integrable by construction"));
    }
    out
}

/// Compares the given closed forms with adaptive quadrature on
/// `sets_per_dim` random parameter sets for each `d` in `1..=3`.
pub fn gaussian_integrals_check(i1: IntegralFn, i2: IntegralFn, sets_per_dim: usize, seed: u64, rel_tol: f64) -> CheckResult {
    let mut max_error: f64 = 0.0;
    let mut cases = 0;
    let mut failures = Vec::new();
    for d in 1..=3 {
        for (j, p) in random_integral_params(d, sets_per_dim, seed).iter().enumerate() {
            cases += 1;
            let outcome = (|| {
                let (q1, q2) = gaussian_integrals_by_quadrature(p)?;
                Ok::<_, crate::Error>((((i1(p)? - q1) / q1).abs(), ((i2(p)? - q2) / q2).abs()))
            })();
            match outcome {
                Ok((e1, e2)) => {
                    let e = e1.max(e2);
                    max_error = max_error.max(if e.is_nan() { f64::INFINITY } else { e });
                    if !(e <= rel_tol) {
                        failures.push(format!("d={d} set {j}: rel err {e:.3e}"));
                    }
                }
                Err(err) => failures.push(format!("d={d} set {j}: {err}")),
            }
        }
    }
    CheckResult {
        name: "gaussian_integrals".into(),
        passed: failures.is_empty(),
        cases,
        max_error,
        detail: if failures.is_empty() { format!("relative tolerance {rel_tol:e}") } else { failures.join("; ") },
    }
}

/// `(objective name, p, lambda)` triples with a well-separated global
/// proximal minimizer.
pub const PROXIMAL_PAIRS: [(&str, f64, f64); 6] = [
    ("fig1_left", 1.0, 2.0),
    ("fig1_left", -0.5, 2.0),
    ("fig1_left", 0.3, 4.0),
    ("fig1_right", 0.3, 0.5),
    ("fig1_right", -1.0, 1.0),
    ("fig1_right", 1.5, 2.0),
];

/// Outcome of [`proximal_limit_case`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximalLimitCase {
    pub objective: String,
    pub p: f64,
    pub lambda: f64,
    pub reference: f64,
    pub sweep: AlphaSweep,
    /// Gaps at `alpha = 1, 10, 100, 1000`.
    pub decade_gaps: Vec<f64>,
}

impl ProximalLimitCase {
    pub fn decades_non_increasing(&self) -> bool {
        self.decade_gaps[1..].windows(2).all(|w| w[1] <= w[0])
    }
}

pub fn proximal_limit_case(name: &str, p: f64, lambda: f64, max_alpha: f64, tol: f64) -> Result<ProximalLimitCase> {
    let f = objectives::by_name(name, 1)?;
    let reference = proximal_point_bruteforce(&f, &[p], lambda, 2.5, 1e-6)?[0];
    let cfg = QuadratureConfig::default();
    let radius = 8.0;
    let sweep = alpha_sweep(&f, p, lambda, reference, &doubling_alphas(max_alpha), tol, radius, &cfg)?;
    let decades = alpha_sweep(&f, p, lambda, reference, &[1.0, 10.0, 100.0, 1000.0], tol, radius, &cfg)?;
    Ok(ProximalLimitCase { objective: name.into(), p, lambda, reference, sweep, decade_gaps: decades.gaps })
}

/// Weighted-ratio limit against the grid proximal oracle on
/// [`PROXIMAL_PAIRS`].
pub fn proximal_limit_check(max_alpha: f64, tol: f64) -> CheckResult {
    let mut max_error: f64 = 0.0;
    let mut failures = Vec::new();
    for (name, p, lambda) in PROXIMAL_PAIRS {
        match proximal_limit_case(name, p, lambda, max_alpha, tol) {
            Ok(c) => {
                max_error = max_error.max(c.sweep.final_gap());
                if c.sweep.final_gap() > tol {
                    failures.push(format!("{name} p={p} lambda={lambda}: final gap {:.3e}", c.sweep.final_gap()));
                }
                if !c.decades_non_increasing() {
                    failures.push(format!("{name} p={p} lambda={lambda}: gaps {:?} not non-increasing", c.decade_gaps));
                }
            }
            Err(e) => failures.push(format!("{name} p={p} lambda={lambda}: {e}")),
        }
    }
    CheckResult {
        name: "proximal_limit".into(),
        passed: failures.is_empty(),
        cases: PROXIMAL_PAIRS.len(),
        max_error,
        detail: if failures.is_empty() { format!("final gap <= {tol:e} at alpha={max_alpha}") } else { failures.join("; ") },
    }
}

/// Monte Carlo normalizer against [`mk_bounds`] on the 2-D sphere with
/// `lambda = 1`, `rho = 0.5`, `M = 1`, for `k = 0..=3`. Each seed places
/// `x_k` in a random direction at a random radius with
/// `|x_k|^2 <= rho^k M`. `max_error` is the largest relative distance
/// outside the envelope (0 when all inside).
pub fn mk_envelope_check(seeds: std::ops::Range<u64>, n: usize) -> CheckResult {
    let (lambda, rho, m, d): (f64, f64, f64, usize) = (1.0, 0.5, 1.0, 2);
    let f = objectives::by_name("sphere", d).expect("sphere is built in");
    let (l, big_l) = f.growth_constants().expect("sphere has growth constants");
    let mut cases = 0;
    let mut max_error: f64 = 0.0;
    let mut failures = Vec::new();
    for seed in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..=3 {
            cases += 1;
            let r2 = rng.random_range(0.0..=1.0) * rho.powi(k) * m;
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let x_k = [r2.sqrt() * angle.cos(), r2.sqrt() * angle.sin()];
            let sigma2 = rho.powi(k) / lambda;
            let (lo, hi) = mk_bounds(l, big_l, lambda, m, d, rho, k);
            match mk_monte_carlo(&f, &x_k, 0.0, sigma2, n, seed.wrapping_mul(31).wrapping_add(k as u64)) {
                Ok(mc) => {
                    let outside = ((lo - mc) / lo).max((mc - hi) / hi).max(0.0);
                    max_error = max_error.max(outside);
                    if !(lo <= mc && mc <= hi) {
                        failures.push(format!("seed {seed} k={k}: {mc:.5} outside [{lo:.5}, {hi:.5}]"));
                    }
                }
                Err(e) => failures.push(format!("seed {seed} k={k}: {e}")),
            }
        }
    }
    CheckResult {
        name: "mk_envelope".into(),
        passed: failures.is_empty(),
        cases,
        max_error,
        detail: if failures.is_empty() { format!("n={n} draws per case") } else { failures.join("; ") },
    }
}

/// `rho_lambda` strictly increasing in `lambda` and in `M` over a grid of
/// the other constants.
pub fn rho_lambda_check() -> CheckResult {
    let mut cases = 0;
    let mut failures = Vec::new();
    let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
    for &(l, big_l) in &[(0.5, 0.5), (1.0, 3.0), (2.0, 2.0)] {
        for d in [1, 2, 5] {
            for w in grid.windows(2) {
                cases += 2;
                if !(rho_lambda(l, big_l, w[0], 1.0, d) < rho_lambda(l, big_l, w[1], 1.0, d)) {
                    failures.push(format!("lambda {} -> {} (l={l}, L={big_l}, d={d})", w[0], w[1]));
                }
                if !(rho_lambda(l, big_l, 0.5, w[0], d) < rho_lambda(l, big_l, 0.5, w[1], d)) {
                    failures.push(format!("M {} -> {} (l={l}, L={big_l}, d={d})", w[0], w[1]));
                }
            }
        }
    }
    CheckResult {
        name: "rho_lambda_monotone".into(),
        passed: failures.is_empty(),
        cases,
        max_error: failures.len() as f64,
        detail: if failures.is_empty() { "strictly increasing".into() } else { failures.join("; ") },
    }
}
