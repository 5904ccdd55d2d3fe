//! Parameter conditions and envelopes for quadratically bounded objectives
//! `l/2 |x-x*|^2 <= f(x) - f* <= L/2 |x-x*|^2`.

use serde::{Deserialize, Serialize};

use crate::app::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::sampling::{gaussian_batch, SamplerKind, SamplerStream};

/// `10 lambda^2 L^{d/2} l^{-(d/2+2)} exp(lambda^2 M / (2l))`.
pub fn rho_lambda(l: f64, big_l: f64, lambda: f64, m: f64, d: usize) -> f64 {
    let h = d as f64 / 2.0;
    10.0 * lambda * lambda * big_l.powf(h) * l.powf(-(h + 2.0)) * (lambda * lambda * m / (2.0 * l)).exp()
}

/// Sample size sufficient for the contraction step to hold with Chebyshev
/// constant `c_prob`.
pub fn n_lower_bound(l: f64, big_l: f64, lambda: f64, m: f64, d: usize, c_prob: f64) -> f64 {
    let h = d as f64 / 2.0;
    c_prob * c_prob * (big_l + lambda).powi(d as i32) / (2f64.powf(h) * lambda.powf(h) * big_l.powf(h))
        * (lambda * m / 2.0).exp()
        * f64::max(1.0, 2.0 * l * l / (5.0 * lambda * lambda))
}

/// Lower and upper envelope of the stable-variant normalizer at iteration `k`.
pub fn mk_bounds(l: f64, big_l: f64, lambda: f64, m: f64, d: usize, rho: f64, k: i32) -> (f64, f64) {
    let rk = rho.powi(k);
    let d = d as f64;
    let lower = rk * l * (3.0 * d).sqrt() / (2.0 * lambda);
    let upper = rk * big_l * d * (3.0 + 6.0 * m * lambda + m * m * lambda * lambda).sqrt() / (2.0 * lambda);
    (lower, upper)
}

/// `sqrt(mean (f(theta) - f*)^2)` over `n` draws `theta ~ N(x_k, sigma2 I)`.
pub fn mk_monte_carlo(objective: &ObjectiveSpec, x_k: &[f64], f_star: f64, sigma2: f64, n: usize, seed: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    let mut stream = SamplerStream::new(SamplerKind::PseudoRandom, seed, objective.dim())?;
    let batch = gaussian_batch(&mut stream, x_k, sigma2, n)?;
    let ms = batch.iter().map(|t| (objective.eval(t) - f_star).powi(2)).sum::<f64>() / n as f64;
    Ok(ms.sqrt())
}

/// Constants of the probabilistic linear-convergence envelope
/// `|x_{k+1} - x*|^2 <= rho^{k+1} M`, kept for reporting only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceEnvelope {
    pub m: f64,
    pub rho_lambda: f64,
    pub c_prob: f64,
    pub gamma_env: f64,
    pub s: usize,
}

/// Count of trace records above the envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub checked: usize,
    pub violations: Vec<usize>,
    pub worst_ratio: f64,
}

impl ConvergenceEnvelope {
    pub fn new(m: f64, rho_lambda: f64, c_prob: f64, gamma_env: f64, s: usize) -> Result<Self> {
        if !(m > 0.0) || !(c_prob > 0.0) || !(gamma_env > 1.0) || s == 0 {
            return Err(Error::InvalidParameter("envelope needs M > 0, C > 0, gamma > 1, s >= 1".into()));
        }
        Ok(Self { m, rho_lambda, c_prob, gamma_env, s })
    }

    /// `6ld/(5 lambda^2) max{1, rho_l/(rho - rho_l)} + |x_1 - x*|^2 / rho`.
    pub fn plain_m(l: f64, d: usize, lambda: f64, rho: f64, rho_lambda: f64, init_err_sq: f64) -> f64 {
        6.0 * l * d as f64 / (5.0 * lambda * lambda) * f64::max(1.0, rho_lambda / (rho - rho_lambda)) + init_err_sq / rho
    }

    /// `6ld/(5 lambda^2) gamma/(gamma-1) + gamma |x_1 - x*|^2 / rho`, the
    /// windowed variant.
    pub fn windowed_m(l: f64, d: usize, lambda: f64, rho: f64, gamma: f64, init_err_sq: f64) -> f64 {
        6.0 * l * d as f64 / (5.0 * lambda * lambda) * gamma / (gamma - 1.0) + gamma / rho * init_err_sq
    }

    /// The envelope applies only when `rho_lambda < rho`.
    pub fn is_valid_for(&self, rho: f64) -> bool {
        self.rho_lambda < rho && rho < 1.0
    }

    /// Bound on the squared error after `k` completed iterations; the
    /// initial point is iterate 1.
    pub fn bound(&self, rho: f64, k: usize) -> f64 {
        rho.powi(k as i32 + 1) * self.m
    }

    /// Checks `err_sq[k] <= rho^{k+1} M` along a squared-error series.
    pub fn check(&self, rho: f64, err_sq: &[f64]) -> EnvelopeReport {
        let mut violations = Vec::new();
        let mut worst_ratio: f64 = 0.0;
        for (k, &e) in err_sq.iter().enumerate() {
            let ratio = e / self.bound(rho, k);
            worst_ratio = worst_ratio.max(ratio);
            if ratio > 1.0 {
                violations.push(k);
            }
        }
        EnvelopeReport { checked: err_sq.len(), violations, worst_ratio }
    }
}
