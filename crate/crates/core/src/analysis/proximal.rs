//! Proximal points `argmin f(x) + lambda/2 |x - p|^2`: a grid oracle and the
//! Gaussian-weighted ratio that approaches it as the inverse temperature grows.

use serde::{Deserialize, Serialize};

use super::quadrature::{weighted_moments, QuadratureConfig};
use crate::app::ObjectiveSpec;
use crate::error::{Error, Result};

const ORACLE_MAX_DIM: usize = 2;

fn check_1d(objective: &ObjectiveSpec) -> Result<()> {
    if objective.dim() != 1 {
        return Err(Error::OracleDimension { max: 1, got: objective.dim() });
    }
    Ok(())
}

/// Grid argmin of `f(x) + lambda/2 |x - p|^2` over the points
/// `p + step * i`, `|step * i_c| <= radius` per coordinate. Ties go to the
/// lexicographically smaller point.
pub fn proximal_point_bruteforce(
    objective: &ObjectiveSpec,
    p: &[f64],
    lambda: f64,
    grid_radius: f64,
    grid_step: f64,
) -> Result<Vec<f64>> {
    let d = objective.dim();
    if d > ORACLE_MAX_DIM {
        return Err(Error::OracleDimension { max: ORACLE_MAX_DIM, got: d });
    }
    if p.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: p.len() });
    }
    if !(grid_step > 0.0) || !(grid_radius >= 0.0) {
        return Err(Error::InvalidParameter("grid step must be positive and radius nonnegative".into()));
    }
    let m = (grid_radius / grid_step + 1e-9).floor() as i64;
    let axis: Vec<i64> = (-m..=m).collect();
    let value = |x: &[f64]| {
        let prox: f64 = x.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum();
        objective.eval(x) + lambda / 2.0 * prox
    };
    let mut best = (f64::INFINITY, p.to_vec());
    let mut x = p.to_vec();
    let mut visit = |x: &[f64]| {
        let v = value(x);
        if v < best.0 {
            best = (v, x.to_vec());
        }
    };
    match d {
        1 => {
            for &i in &axis {
                x[0] = p[0] + grid_step * i as f64;
                visit(&x);
            }
        }
        _ => {
            for &i in &axis {
                x[0] = p[0] + grid_step * i as f64;
                for &j in &axis {
                    x[1] = p[1] + grid_step * j as f64;
                    visit(&x);
                }
            }
        }
    }
    Ok(best.1)
}

/// `int x w / int w` with `w = exp(-alpha (f(x) + lambda/2 (x - p)^2))`,
/// integrated over `[p - quad_radius, p + quad_radius]`.
pub fn asymptotic_ratio_estimate(
    objective: &ObjectiveSpec,
    p: f64,
    lambda: f64,
    alpha: f64,
    quad_radius: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    check_1d(objective)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let log_w = |x: f64| -alpha * (objective.eval(&[x]) + lambda / 2.0 * (x - p).powi(2));
    let id = |x: f64| x;
    let r = weighted_moments(p - quad_radius, p + quad_radius, &log_w, &[&id], config)?;
    Ok(r.ratios[0])
}

/// Gap between the weighted ratio and a reference proximal point over a
/// sweep of `alpha` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweep {
    pub alphas: Vec<f64>,
    pub gaps: Vec<f64>,
    /// Smallest tested `alpha` whose gap is within the tolerance.
    pub alpha_eps: Option<f64>,
}

impl AlphaSweep {
    pub fn final_gap(&self) -> f64 {
        *self.gaps.last().expect("sweep has at least one alpha")
    }
}

/// Evaluates the ratio at each `alpha` and records `|ratio - reference|`.
pub fn alpha_sweep(
    objective: &ObjectiveSpec,
    p: f64,
    lambda: f64,
    reference: f64,
    alphas: &[f64],
    tol: f64,
    quad_radius: f64,
    config: &QuadratureConfig,
) -> Result<AlphaSweep> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("empty alpha sweep".into()));
    }
    let gaps = alphas
        .iter()
        .map(|&a| Ok((asymptotic_ratio_estimate(objective, p, lambda, a, quad_radius, config)? - reference).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let alpha_eps = alphas.iter().zip(&gaps).find(|(_, g)| **g <= tol).map(|(a, _)| *a);
    Ok(AlphaSweep { alphas: alphas.to_vec(), gaps, alpha_eps })
}

/// `1, 2, 4, ..` up to and including `max_alpha`.
pub fn doubling_alphas(max_alpha: f64) -> Vec<f64> {
    std::iter::successors(Some(1.0), |a| Some(a * 2.0)).take_while(|a| *a <= max_alpha).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UkDiagnostic {
    /// `int |x - x*| psi / int psi`.
    pub u_k: f64,
    /// `int x psi / int psi`, the exact-expectation iterate.
    pub e_next: f64,
}

/// Quadrature evaluation of `U_k` with `psi(x) = exp(-rho^{-k} (f(x) + lambda/2 (x - x_k)^2))`
/// on `[x* - quad_radius, x* + quad_radius]`.
pub fn uk_diagnostic(
    objective: &ObjectiveSpec,
    x_k: f64,
    x_star: f64,
    lambda: f64,
    rho: f64,
    k: i32,
    quad_radius: f64,
    config: &QuadratureConfig,
) -> Result<UkDiagnostic> {
    check_1d(objective)?;
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (0,1), got {rho}")));
    }
    let alpha = rho.powi(-k);
    let log_psi = |x: f64| -alpha * (objective.eval(&[x]) + lambda / 2.0 * (x - x_k).powi(2));
    let phi = |x: f64| (x - x_star).abs();
    let id = |x: f64| x;
    let r = weighted_moments(x_star - quad_radius, x_star + quad_radius, &log_psi, &[&phi, &id], config)?;
    Ok(UkDiagnostic { u_k: r.ratios[0], e_next: r.ratios[1] })
}
