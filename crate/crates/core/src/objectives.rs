//! Test functions and a sampler-based checker for the quadratic growth
//! envelope around the global minimizer.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::app::ObjectiveSpec;
use crate::error::{Error, Result};

/// Names accepted by [`by_name`].
pub const OBJECTIVE_NAMES: [&str; 4] = ["revised_rastrigin", "fig1_left", "fig1_right", "sphere"];

/// Log-compressed Rastrigin variant with `5^d` local minima in `[-1,1]^d`
/// and its unique global minimum `0` at the origin:
///
/// `f(x) = log(|x|^2 - 1/2 sum cos(5 pi x_i) + d/2 + 1/10) - log(1/10)`.
///
/// Evaluated as `ln_1p(10 |x|^2 + 10 sum sin^2(5 pi x_i / 2))`, which is the
/// same function without cancellation near the origin.
pub fn revised_rastrigin(x: &[f64]) -> f64 {
    let excess: f64 = x
        .iter()
        .map(|&xi| {
            let s = (2.5 * PI * xi).sin();
            xi * xi + s * s
        })
        .sum();
    let v = (10.0 * excess).ln_1p();
    debug_assert!(v.is_finite() || x.iter().any(|xi| !xi.is_finite()));
    v
}

/// `x^2 + x^2 cos(5 pi x) / 2`, bounded by `x^2/2` and `3x^2/2`.
pub fn fig1_left(x: f64) -> f64 {
    x * x + x * x * (5.0 * PI * x).cos() / 2.0
}

/// `x^2 - cos(5 pi x)/2 + 1/2`, bounded below by `x^2` and above by `65x^2`
/// on `[-1, 1]`.
pub fn fig1_right(x: f64) -> f64 {
    let s = (2.5 * PI * x).sin();
    // 1/2 - cos(t)/2 == sin^2(t/2)
    x * x + s * s
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Builds a named objective in dimension `dim` with its minimizer attached.
///
/// The one-dimensional figure objectives reject `dim != 1`.
pub fn by_name(name: &str, dim: usize) -> Result<ObjectiveSpec> {
    let origin = vec![0.0; dim.max(1)];
    let spec = match name {
        "revised_rastrigin" => ObjectiveSpec::new(name, dim, revised_rastrigin)?,
        "sphere" => ObjectiveSpec::new(name, dim, sphere)?.with_growth_constants(2.0, 2.0)?,
        "fig1_left" | "fig1_right" => {
            if dim != 1 {
                return Err(Error::InvalidParameter(format!("{name} is one-dimensional, got dim={dim}")));
            }
            if name == "fig1_left" {
                ObjectiveSpec::new(name, 1, |x: &[f64]| fig1_left(x[0]))?.with_growth_constants(1.0, 3.0)?
            } else {
                ObjectiveSpec::new(name, 1, |x: &[f64]| fig1_right(x[0]))?
            }
        }
        other => return Err(Error::Config(format!("unknown objective {other:?}"))),
    };
    spec.with_minimizer(origin, 0.0)
}

/// Outcome of [`check_assumption_bounds`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub tested_points: usize,
    pub violations_lower: usize,
    /// Most negative `f(x) - f* - (l/2)|x-x*|^2` observed (0 when none).
    pub worst_lower_margin: f64,
    pub violations_upper: usize,
    /// Most negative `f* + (L/2)|x-x*|^2 - f(x)` observed (0 when none).
    pub worst_upper_margin: f64,
    pub region: String,
}

impl BoundCheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations_lower == 0 && self.violations_upper == 0
    }
}

/// Samples `n_samples` points uniformly in the ball of radius `region_radius`
/// around `x*` and counts violations of either side of the growth envelope.
pub fn check_assumption_bounds(
    objective: &ObjectiveSpec,
    l: f64,
    big_l: f64,
    region_radius: f64,
    n_samples: usize,
    seed: u64,
) -> Result<BoundCheckReport> {
    let x_star = objective.known_minimizer().ok_or(Error::MissingMinimizer)?;
    let f_star = objective.known_minimum().ok_or(Error::MissingMinimizer)?;
    if !(l > 0.0 && l <= big_l) {
        return Err(Error::InvalidParameter(format!("need 0 < l <= L, got l={l}, L={big_l}")));
    }
    if !(region_radius > 0.0) {
        return Err(Error::InvalidParameter("region radius must be positive".into()));
    }
    let d = objective.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BoundCheckReport {
        tested_points: n_samples,
        violations_lower: 0,
        worst_lower_margin: 0.0,
        violations_upper: 0,
        worst_upper_margin: 0.0,
        region: format!("ball of radius {region_radius} around x* in R^{d}"),
    };
    let mut x = vec![0.0; d];
    let mut dir = vec![0.0; d];
    for _ in 0..n_samples {
        uniform_in_ball(&mut rng, region_radius, &mut dir);
        for ((xi, &c), &u) in x.iter_mut().zip(x_star).zip(&dir) {
            *xi = c + u;
        }
        let r2: f64 = dir.iter().map(|v| v * v).sum();
        let fx = objective.eval(&x);
        // tiny slack so that exact-equality objectives (sphere with l=L=2)
        // are not flagged through rounding
        let slack = 1e-12 * (1.0 + fx.abs());
        let lower_margin = fx - f_star - 0.5 * l * r2;
        let upper_margin = f_star + 0.5 * big_l * r2 - fx;
        if lower_margin < -slack {
            report.violations_lower += 1;
            report.worst_lower_margin = report.worst_lower_margin.min(lower_margin);
        }
        if upper_margin < -slack {
            report.violations_upper += 1;
            report.worst_upper_margin = report.worst_upper_margin.min(upper_margin);
        }
    }
    Ok(report)
}

fn uniform_in_ball<R: Rng>(rng: &mut R, radius: f64, out: &mut [f64]) {
    let d = out.len();
    loop {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
            for v in out.iter_mut() {
                *v *= r / norm;
            }
            return;
        }
    }
}

/// Empirical envelope constants `(l, L)` from a grid scan of
/// `2 (f(x) - f*) / |x - x*|^2` over `[-half_width, half_width]^d` around
/// `x*`, for `d <= 2`. The minimizer itself is skipped.
pub fn grid_envelope(objective: &ObjectiveSpec, half_width: f64, points_per_axis: usize) -> Result<(f64, f64)> {
    let x_star = objective.known_minimizer().ok_or(Error::MissingMinimizer)?;
    let f_star = objective.known_minimum().ok_or(Error::MissingMinimizer)?;
    let d = objective.dim();
    if d > 2 {
        return Err(Error::OracleDimension { max: 2, got: d });
    }
    if points_per_axis < 2 {
        return Err(Error::InvalidParameter("need at least 2 grid points per axis".into()));
    }
    let step = 2.0 * half_width / (points_per_axis - 1) as f64;
    let axis: Vec<f64> = (0..points_per_axis).map(|i| -half_width + i as f64 * step).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut visit = |offset: &[f64]| {
        let r2: f64 = offset.iter().map(|v| v * v).sum();
        if r2 < 1e-20 {
            return;
        }
        let x: Vec<f64> = x_star.iter().zip(offset).map(|(a, b)| a + b).collect();
        let ratio = 2.0 * (objective.eval(&x) - f_star) / r2;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    };
    if d == 1 {
        for &a in &axis {
            visit(&[a]);
        }
    } else {
        for &a in &axis {
            for &b in &axis {
                visit(&[a, b]);
            }
        }
    }
    Ok((lo, hi))
}
