use serde::{Deserialize, Serialize};

use crate::analysis::{
    gaussian_integral_i1, gaussian_integral_i2, gaussian_integrals_check, mk_envelope_check, proximal_limit_check,
    rho_lambda_check, CheckResult, IntegralFn,
};

/// Settings for the oracle suite. The closed forms are injectable so a
/// deliberately broken implementation can be shown to fail.
#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub i1: IntegralFn,
    pub i2: IntegralFn,
    pub integral_sets_per_dim: usize,
    pub integral_seed: u64,
    pub integral_rel_tol: f64,
    pub max_alpha: f64,
    pub proximal_tol: f64,
    pub mk_seeds: u64,
    pub mk_draws: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            i1: gaussian_integral_i1,
            i2: gaussian_integral_i2,
            integral_sets_per_dim: 20,
            integral_seed: 0,
            integral_rel_tol: 1e-8,
            max_alpha: 4096.0,
            proximal_tol: 1e-3,
            mk_seeds: 10,
            mk_draws: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every check; a failing check never stops the others.
pub fn validate(opts: &ValidateOptions) -> ValidationReport {
    let ((integrals, prox), (mk, rho)) = rayon::join(
        || {
            rayon::join(
                || gaussian_integrals_check(opts.i1, opts.i2, opts.integral_sets_per_dim, opts.integral_seed, opts.integral_rel_tol),
                || proximal_limit_check(opts.max_alpha, opts.proximal_tol),
            )
        },
        || rayon::join(|| mk_envelope_check(0..opts.mk_seeds, opts.mk_draws), rho_lambda_check),
    );
    ValidationReport { checks: vec![integrals, prox, mk, rho] }
}
