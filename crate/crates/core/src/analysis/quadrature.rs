//! One-dimensional quadrature: adaptive Gauss-Kronrod for plain integrals and
//! refined composite Simpson for ratios of exponentially weighted moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Composite Simpson settings for weighted-moment ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Subintervals of the first pass, rounded up to a multiple of 4 so the
    /// interval midpoint is always a panel boundary.
    pub initial_intervals: usize,
    /// Stop once two successive doublings change every ratio by less than this.
    pub tol: f64,
    /// Refinement gives up past this many subintervals.
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { initial_intervals: 256, tol: 1e-10, max_intervals: 1 << 23 }
    }
}

/// Weighted-moment ratios from [`weighted_moments`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRatios {
    /// `int h_j w / int w`, one per moment function.
    pub ratios: Vec<f64>,
    /// `log int w`, including the max shift.
    pub log_mass: f64,
    pub intervals: usize,
}

fn simpson_pass(
    a: f64,
    b: f64,
    intervals: usize,
    log_w: &dyn Fn(f64) -> f64,
    moments: &[&dyn Fn(f64) -> f64],
) -> Result<(Vec<f64>, f64)> {
    let h = (b - a) / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals).map(|i| a + h * i as f64).collect();
    let g: Vec<f64> = nodes.iter().map(|&x| log_w(x)).collect();
    if g.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::NonFiniteExponent);
    }
    let shift = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(Error::VanishingMass);
    }
    let mut den = 0.0;
    let mut num = vec![0.0; moments.len()];
    for (i, (&x, &gi)) in nodes.iter().zip(&g).enumerate() {
        let c = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let w = c * (gi - shift).exp();
        den += w;
        for (acc, m) in num.iter_mut().zip(moments) {
            *acc += w * m(x);
        }
    }
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::VanishingMass);
    }
    let log_mass = (den * h / 3.0).ln() + shift;
    Ok((num.into_iter().map(|v| v / den).collect(), log_mass))
}

/// Ratios `int_a^b h_j(x) e^{log_w(x)} dx / int_a^b e^{log_w(x)} dx` by
/// composite Simpson with the exponent shifted by its maximum over the nodes.
///
/// The node count doubles until two successive refinements agree to
/// `config.tol`. Running out of refinements is reported as vanishing mass:
/// the weight is concentrated below the grid resolution.
pub fn weighted_moments(
    a: f64,
    b: f64,
    log_w: &dyn Fn(f64) -> f64,
    moments: &[&dyn Fn(f64) -> f64],
    config: &QuadratureConfig,
) -> Result<MomentRatios> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("bad quadrature interval [{a}, {b}]")));
    }
    let mut intervals = config.initial_intervals.max(4).next_multiple_of(4);
    let (mut prev, _) = simpson_pass(a, b, intervals, log_w, moments)?;
    let mut agreed = 0;
    while intervals * 2 <= config.max_intervals {
        intervals *= 2;
        let (cur, log_mass) = simpson_pass(a, b, intervals, log_w, moments)?;
        let delta = cur.iter().zip(&prev).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        agreed = if delta < config.tol { agreed + 1 } else { 0 };
        if agreed == 2 {
            return Ok(MomentRatios { ratios: cur, log_mass, intervals });
        }
        prev = cur;
    }
    Err(Error::VanishingMass)
}

// 15-point Kronrod nodes on [0,1] half of [-1,1], with embedded 7-point Gauss.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let fs = f(c - h * XGK[j]) + f(c + h * XGK[j]);
        k += WGK[j] * fs;
        if j % 2 == 1 {
            g += WG[j / 2] * fs;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) integral of `f` over `[a, b]`, bisecting
/// the panel with the largest error estimate until the total estimate
/// drops below `max(abs_tol, rel_tol |I|)`.
///
/// The first pass uses 64 equal panels; features narrower than a panel's
/// node spacing can go unseen.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    const MAX_SEGMENTS: usize = 20_000;
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("bad quadrature interval [{a}, {b}]")));
    }
    const INITIAL_PANELS: usize = 64;
    let w = (b - a) / INITIAL_PANELS as f64;
    let mut segs: Vec<(f64, f64, f64, f64)> = (0..INITIAL_PANELS)
        .map(|i| {
            let (lo, hi) = (a + w * i as f64, if i + 1 == INITIAL_PANELS { b } else { a + w * (i + 1) as f64 });
            let (v, e) = gk15(f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    loop {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if !total.is_finite() {
            return Err(Error::InvalidParameter("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(Error::InvalidParameter(format!("quadrature stalled at error estimate {err:e}")));
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (lo, hi, _, _) = segs.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
}
