use serde::{Deserialize, Serialize};

use crate::app::TraceRow;
use crate::error::{Error, Result};

/// Least-squares fit of `ln err_sq = a + k ln rho_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rho_hat: f64,
    pub r_squared: f64,
    /// First and last `k` used, inclusive.
    pub window: (usize, usize),
    pub points: usize,
}

/// Fits the squared-error column of `rows`.
///
/// `window` selects records with `a <= k <= b`. Without it the first 10%
/// of the records (rounded down) are dropped as transient. The window is
/// cut before the first record whose error is exactly zero.
pub fn fit_rate(rows: &[TraceRow], window: Option<(usize, usize)>) -> Result<RateFit> {
    let selected: Vec<&TraceRow> = match window {
        Some((a, b)) => rows.iter().filter(|r| r.k >= a && r.k <= b).collect(),
        None => rows.iter().skip(rows.len() / 10).collect(),
    };
    let mut pts = Vec::with_capacity(selected.len());
    for r in selected {
        match r.err_sq {
            None => return Err(Error::InvalidParameter(format!("record k={} has no squared error", r.k))),
            Some(e) if e <= 0.0 => break,
            Some(e) => pts.push((r.k as f64, e.ln())),
        }
    }
    if pts.len() < 3 {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        rho_hat: slope.exp(),
        r_squared,
        window: (pts[0].0 as usize, pts[pts.len() - 1].0 as usize),
        points: pts.len(),
    })
}

/// Parses `a:b` into an inclusive `k` range.
pub fn parse_window(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::Config(format!("window must look like a:b, got {s:?}")))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| Error::Config(format!("window bound {t:?}: {e}")));
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(Error::Config(format!("empty window {a}:{b}")));
    }
    Ok((a, b))
}
