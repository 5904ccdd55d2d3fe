use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Exponentially weighted mean `sum_i p_i e^{g_i} / sum_i e^{g_i}`.
///
/// The exponents are shifted by their maximum before exponentiation, which
/// leaves the ratio unchanged and keeps the largest weight at exactly 1.
/// Terms are accumulated in a canonical order (by exponent, then by point)
/// so the result does not depend on the order of the input pairs.
pub fn weighted_mean<P: AsRef<[f64]>>(points: &[P], exponents: &[f64]) -> Result<Vec<f64>> {
    check_inputs(points, exponents)?;
    let g_max = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|g| (g - g_max).exp()).collect();
    Ok(accumulate(points, exponents, &weights).expect("max-shifted weights include a 1"))
}

/// Same ratio with weights `e^{g_i}` taken literally, without the max shift.
///
/// Returns `Ok(None)` when every weight underflows to zero.
pub fn weighted_mean_unshifted<P: AsRef<[f64]>>(points: &[P], exponents: &[f64]) -> Result<Option<Vec<f64>>> {
    check_inputs(points, exponents)?;
    let weights: Vec<f64> = exponents.iter().map(|g| g.exp()).collect();
    if weights.iter().any(|w| w.is_infinite()) {
        return Err(Error::NonFiniteExponent);
    }
    Ok(accumulate(points, exponents, &weights))
}

fn check_inputs<P: AsRef<[f64]>>(points: &[P], exponents: &[f64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if points.len() != exponents.len() {
        return Err(Error::InvalidParameter(format!(
            "{} points but {} exponents",
            points.len(),
            exponents.len()
        )));
    }
    if exponents.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteExponent);
    }
    let dim = points[0].as_ref().len();
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: p.as_ref().len() });
    }
    Ok(())
}

fn canonical_order<P: AsRef<[f64]>>(points: &[P], exponents: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        exponents[b].total_cmp(&exponents[a]).then_with(|| {
            points[a]
                .as_ref()
                .iter()
                .zip(points[b].as_ref())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    order
}

fn accumulate<P: AsRef<[f64]>>(points: &[P], exponents: &[f64], weights: &[f64]) -> Option<Vec<f64>> {
    let dim = points[0].as_ref().len();
    let mut num = vec![0.0; dim];
    let mut den = 0.0;
    for i in canonical_order(points, exponents) {
        let w = weights[i];
        den += w;
        for (acc, &p) in num.iter_mut().zip(points[i].as_ref()) {
            *acc += w * p;
        }
    }
    if den == 0.0 {
        return None;
    }
    for (c, acc) in num.iter_mut().enumerate() {
        let (lo, hi) = points
            .iter()
            .map(|p| p.as_ref()[c])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        // a weighted average can land one ulp outside the hull after rounding
        *acc = (*acc / den).clamp(lo, hi);
    }
    Some(num)
}
