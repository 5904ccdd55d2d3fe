use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The first `count` primes, in increasing order.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| !candidate.is_multiple_of(p)) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Base-`base` radical inverse of `index`: the digits of `index` mirrored
/// about the radix point.
pub fn radical_inverse(index: u64, base: u64) -> Result<f64> {
    if base < 2 {
        return Err(Error::InvalidParameter(format!("radical inverse base must be >= 2, got {base}")));
    }
    Ok(scrambled_radical_inverse(index, base, None))
}

/// Radical inverse with each digit mapped through `perm` (a permutation of
/// `0..base` with `perm[0] == 0`) before mirroring.
pub(crate) fn scrambled_radical_inverse(mut index: u64, base: u64, perm: Option<&[u32]>) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut factor = inv_base;
    let mut acc = 0.0;
    while index > 0 {
        let digit = (index % base) as usize;
        let mapped = perm.map_or(digit as u32, |p| p[digit]);
        acc += mapped as f64 * factor;
        index /= base;
        factor *= inv_base;
    }
    acc
}

/// Seed-derived digit permutation of `{0, .., base-1}` that keeps 0 fixed.
///
/// Used as an RR2-style scramble: it is applied digit-wise before radical
/// inversion, so it keeps the stratification of the unscrambled sequence.
pub fn scramble_permutation(base: u64, seed: u64) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..base as u32).collect();
    if base > 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ base.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        perm[1..].shuffle(&mut rng);
    }
    perm
}

/// Multi-dimensional scrambled Halton generator over the first `dim` primes.
///
/// Index 0 (the all-zero point) is never produced.
#[derive(Debug, Clone)]
pub struct ScrambledHalton {
    bases: Vec<u64>,
    perms: Vec<Vec<u32>>,
    next_index: u64,
}

impl ScrambledHalton {
    pub fn new(dim: usize, seed: u64) -> Self {
        let bases = first_primes(dim);
        let perms = bases.iter().map(|&b| scramble_permutation(b, seed)).collect();
        Self { bases, perms, next_index: 1 }
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    /// Index of the next point to be produced.
    pub fn next_index(&self) -> u64 {
        self.next_index
    }

    /// Writes the next point into `out` and returns its index.
    pub fn next_point(&mut self, out: &mut [f64]) -> u64 {
        debug_assert_eq!(out.len(), self.bases.len());
        let index = self.next_index;
        for ((o, &b), p) in out.iter_mut().zip(&self.bases).zip(&self.perms) {
            *o = scrambled_radical_inverse(index, b, Some(p));
        }
        self.next_index += 1;
        index
    }
}
