//! Gaussian sample batches `N(mean, sigma^2 I_d)` drawn from a seeded
//! pseudo-random stream or from a scrambled Halton sequence.
//!
//! A [`SamplerStream`] is consumed sequentially and never hands out the same
//! underlying point twice: the Halton variant walks indices `1, 2, 3, ..`
//! exactly once each.

mod halton;
mod normal;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use halton::{first_primes, radical_inverse, scramble_permutation, ScrambledHalton};
pub use normal::inverse_normal_cdf;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    #[default]
    PseudoRandom,
    ScrambledHalton,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::PseudoRandom => "pseudo_random",
            SamplerKind::ScrambledHalton => "scrambled_halton",
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pseudo_random" => Ok(SamplerKind::PseudoRandom),
            "scrambled_halton" => Ok(SamplerKind::ScrambledHalton),
            other => Err(Error::Config(format!("unknown sampler {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Source {
    Pseudo(Box<ChaCha8Rng>),
    Halton(ScrambledHalton),
}

/// Single-owner stream of standard normal vectors in `R^dim`.
#[derive(Debug, Clone)]
pub struct SamplerStream {
    kind: SamplerKind,
    seed: u64,
    dim: usize,
    points_drawn: u64,
    source: Source,
}

impl SamplerStream {
    pub fn new(kind: SamplerKind, seed: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("sampler dimension must be positive".into()));
        }
        let source = match kind {
            SamplerKind::PseudoRandom => Source::Pseudo(Box::new(ChaCha8Rng::seed_from_u64(seed))),
            SamplerKind::ScrambledHalton => Source::Halton(ScrambledHalton::new(dim, seed)),
        };
        Ok(Self { kind, seed, dim, points_drawn: 0, source })
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points consumed so far. For the Halton stream the next
    /// underlying index is `points_drawn + 1`.
    pub fn points_drawn(&self) -> u64 {
        self.points_drawn
    }

    /// Fills `out` with one standard normal vector and returns the
    /// underlying point index (1-based).
    pub fn next_standard_normal(&mut self, out: &mut [f64]) -> u64 {
        debug_assert_eq!(out.len(), self.dim);
        match &mut self.source {
            Source::Pseudo(rng) => {
                for v in out.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
            }
            Source::Halton(h) => {
                h.next_point(out);
                for v in out.iter_mut() {
                    // Halton coordinates are in (0,1) for indices >= 1
                    *v = normal::ppnd16(*v);
                }
            }
        }
        self.points_drawn += 1;
        self.points_drawn
    }
}

/// `n` points drawn from `N(mean_used, variance_used I_d)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    points: Vec<f64>,
    dim: usize,
    pub mean_used: Vec<f64>,
    pub variance_used: f64,
    /// Underlying stream indices of the points, in batch order.
    pub indices: Vec<u64>,
}

impl SampleBatch {
    /// Builds a batch from explicit points (used for hand-constructed
    /// batches and tests). Every coordinate must be finite.
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::EmptyBatch)?;
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite sample coordinate".into()));
            }
            flat.extend_from_slice(p);
        }
        let n = points.len();
        let mut mean = vec![0.0; dim];
        for p in &points {
            for (m, v) in mean.iter_mut().zip(p) {
                *m += v / n as f64;
            }
        }
        Ok(Self { points: flat, dim, mean_used: mean, variance_used: 0.0, indices: (1..=n as u64).collect() })
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }
}

/// Draws the next `n` points of `stream`, scaled by `sqrt(variance)` and
/// shifted by `mean`.
pub fn gaussian_batch(stream: &mut SamplerStream, mean: &[f64], variance: f64, n: usize) -> Result<SampleBatch> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::InvalidParameter(format!("variance must be positive and finite, got {variance}")));
    }
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if mean.len() != stream.dim() {
        return Err(Error::DimensionMismatch { expected: stream.dim(), got: mean.len() });
    }
    let d = stream.dim();
    let sd = variance.sqrt();
    let mut points = vec![0.0; n * d];
    let mut indices = Vec::with_capacity(n);
    for row in points.chunks_exact_mut(d) {
        indices.push(stream.next_standard_normal(row));
        for (v, &m) in row.iter_mut().zip(mean) {
            *v = m + sd * *v;
        }
    }
    Ok(SampleBatch { points, dim: d, mean_used: mean.to_vec(), variance_used: variance, indices })
}
