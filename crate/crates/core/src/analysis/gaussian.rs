//! Closed forms for the two Gaussian integrals
//!
//! `i1 = int exp(-alpha (beta/2 |x-u|^2 + gamma/2 |x-v|^2)) dx`
//! `i2 = int |x-u|^2 exp(-alpha (beta/2 |x-u|^2 + gamma/2 |x-v|^2)) dx`
//!
//! over `R^d`, plus a quadrature oracle that evaluates the same integrals
//! numerically.

use serde::{Deserialize, Serialize};

use super::quadrature;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianIntegralParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl GaussianIntegralParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() });
        }
        if u.is_empty() {
            return Err(Error::InvalidParameter("integration dimension must be positive".into()));
        }
        let p = Self { alpha, beta, gamma, u, v };
        p.check()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `alpha (beta + gamma)`, the precision of the integrand.
    pub fn precision(&self) -> f64 {
        self.alpha * (self.beta + self.gamma)
    }

    fn check(&self) -> Result<()> {
        if !(self.precision() > 0.0) {
            return Err(Error::DivergentIntegral);
        }
        Ok(())
    }

    fn dist_sq(&self) -> f64 {
        self.u.iter().zip(&self.v).map(|(a, b)| (a - b).powi(2)).sum()
    }
}

pub fn gaussian_integral_i1(p: &GaussianIntegralParams) -> Result<f64> {
    p.check()?;
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let d = p.dim() as f64;
    Ok((-a * b * g * p.dist_sq() / (2.0 * (b + g))).exp() * (2.0 * std::f64::consts::PI / p.precision()).powf(d / 2.0))
}

pub fn gaussian_integral_i2(p: &GaussianIntegralParams) -> Result<f64> {
    let i1 = gaussian_integral_i1(p)?;
    let (b, g) = (p.beta, p.gamma);
    let d = p.dim() as f64;
    Ok(i1 * (d / p.precision() + g * g * p.dist_sq() / ((b + g) * (b + g))))
}

/// Both integrals by adaptive quadrature. The integrand factors over
/// coordinates, so each is assembled from one-dimensional integrals taken
/// over 40 standard deviations either side of the peak.
pub fn gaussian_integrals_by_quadrature(p: &GaussianIntegralParams) -> Result<(f64, f64)> {
    p.check()?;
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let sd = p.precision().sqrt().recip();
    let mut m0 = Vec::with_capacity(p.dim());
    let mut m2 = Vec::with_capacity(p.dim());
    let mut log_scale = 0.0;
    for (&uj, &vj) in p.u.iter().zip(&p.v) {
        let expo = move |x: f64| -a * (b * (x - uj).powi(2) + g * (x - vj).powi(2)) / 2.0;
        let peak = (b * uj + g * vj) / (b + g);
        let shift = expo(peak);
        log_scale += shift;
        let (lo, hi) = (peak - 40.0 * sd, peak + 40.0 * sd);
        m0.push(quadrature::integrate(&|x| (expo(x) - shift).exp(), lo, hi, 0.0, 1e-13)?);
        m2.push(quadrature::integrate(&|x| (x - uj).powi(2) * (expo(x) - shift).exp(), lo, hi, 0.0, 1e-13)?);
    }
    let prod: f64 = m0.iter().product();
    let i1 = prod * log_scale.exp();
    let i2: f64 = (0..p.dim())
        .map(|j| m2[j] * m0.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v).product::<f64>())
        .sum::<f64>()
        * log_scale.exp();
    Ok((i1, i2))
}
