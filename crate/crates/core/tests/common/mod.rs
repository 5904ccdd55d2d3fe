//! Core invariants as proptest properties, shared by the property tests
//! and the acceptance summary.
#![allow(dead_code)]

use asymprox::app::{app_step, weighted_mean, IterateState};
use asymprox::objectives;
use asymprox::sampling::{gaussian_batch, inverse_normal_cdf, SampleBatch, SamplerStream};
use asymprox::{run, AppParams, ObjectiveSpec, SamplerKind, Variant};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type PropResult = Result<(), TestCaseError>;

pub fn points_and_exponents(max_n: usize, max_d: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        (
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), n),
            prop::collection::vec(-50.0f64..0.0, n),
        )
    })
}

fn scale(points: &[Vec<f64>]) -> f64 {
    points.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()))
}

pub fn shift_invariance(points: Vec<Vec<f64>>, g: Vec<f64>, c: f64) -> PropResult {
    let a = weighted_mean(&points, &g).unwrap();
    let shifted: Vec<f64> = g.iter().map(|v| v + c).collect();
    let b = weighted_mean(&points, &shifted).unwrap();
    let tol = 1e-12 * scale(&points);
    for (x, y) in a.iter().zip(&b) {
        prop_assert!((x - y).abs() <= tol, "{x} vs {y} (c = {c})");
    }
    Ok(())
}

pub fn permutation_invariance(points: Vec<Vec<f64>>, g: Vec<f64>, perm_seed: u64) -> PropResult {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
    let p2: Vec<Vec<f64>> = order.iter().map(|&i| points[i].clone()).collect();
    let g2: Vec<f64> = order.iter().map(|&i| g[i]).collect();
    prop_assert_eq!(weighted_mean(&points, &g).unwrap(), weighted_mean(&p2, &g2).unwrap());
    Ok(())
}

fn rastrigin(d: usize) -> ObjectiveSpec {
    objectives::by_name("revised_rastrigin", d).unwrap()
}

/// Every variant's next iterate lies in the coordinate-wise hull of its batch.
pub fn hull_containment(points: Vec<Vec<f64>>, k: usize, variant: Variant) -> PropResult {
    let d = points[0].len();
    let f = rastrigin(d);
    let params = AppParams::new(d, 0.9, points.len(), variant, 1, 0);
    let mut state = IterateState::initial(vec![0.0; d], &params);
    state.k = k;
    let batch = SampleBatch::from_points(points.clone()).unwrap();
    let next = match app_step(&state, &f, &params, &batch) {
        Ok(n) => n,
        Err(asymprox::Error::DegenerateWeights { .. }) if variant == Variant::OriginalNaive => return Ok(()),
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    };
    for j in 0..d {
        let lo = points.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= next.x[j] && next.x[j] <= hi, "coordinate {j}: {} outside [{lo}, {hi}]", next.x[j]);
    }
    Ok(())
}

/// Original and original_naive give the same next iterate from the same
/// state and batch, at every iteration until a naive weight leaves the
/// normal range.
pub fn variant_equivalence(seed: u64, d: usize, n: usize, iters: usize) -> PropResult {
    let f = rastrigin(d);
    let shifted = AppParams::new(d, 0.9, n, Variant::Original, iters, seed);
    let naive = AppParams { variant: Variant::OriginalNaive, ..shifted.clone() };
    let mut stream = SamplerStream::new(shifted.sampler, seed, d).unwrap();
    let mut state = IterateState::initial(asymprox::app::sphere_point(d, (d as f64).sqrt(), seed), &shifted);
    for _ in 0..iters {
        let batch = gaussian_batch(&mut stream, &state.x, shifted.sigma2(state.k), n).unwrap();
        let scale = 0.9f64.powi(-(state.k as i32));
        if batch.iter().any(|p| (-scale * f.eval(p)).exp() < f64::MIN_POSITIVE) {
            break;
        }
        let a = app_step(&state, &f, &shifted, &batch).map_err(|e| TestCaseError::fail(e.to_string()))?;
        match app_step(&state, &f, &naive, &batch) {
            Ok(b) => {
                for (x, y) in a.x.iter().zip(&b.x) {
                    prop_assert!((x - y).abs() <= 1e-10, "k={}: {x} vs {y}", state.k);
                }
            }
            Err(asymprox::Error::DegenerateWeights { .. }) => break,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
        state = a;
    }
    Ok(())
}

/// The stable variant stays finite for 200 iterations.
pub fn stable_stays_finite(seed: u64, d: usize, sampler: SamplerKind) -> PropResult {
    let f = rastrigin(d);
    let p = AppParams { sampler, ..AppParams::new(d, 0.9, 20, Variant::Stable, 200, seed) };
    let t = run(&f, &p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(t.records.len(), 201);
    for r in &t.records {
        prop_assert!(r.x.iter().all(|v| v.is_finite()), "k={}", r.k);
        prop_assert!(r.m_hat.is_none_or(f64::is_finite) && r.err_sq.is_some_and(f64::is_finite), "k={}", r.k);
    }
    Ok(())
}

/// Recorded variances are exactly `rho^k / lambda`.
pub fn sigma_schedule(seed: u64, rho: f64, lambda: f64, iters: usize) -> PropResult {
    let f = objectives::by_name("sphere", 2).unwrap();
    let p = AppParams { lambda, ..AppParams::new(2, rho, 5, Variant::Stable, iters, seed) };
    let t = run(&f, &p).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(t.records[0].sigma2, None);
    for r in &t.records[1..] {
        prop_assert_eq!(r.sigma2, Some(rho.powi(r.k as i32) / lambda));
    }
    Ok(())
}

/// A Halton stream consumes indices `1..=n*k` once each over `k` batches.
pub fn halton_non_repetition(seed: u64, d: usize, n: usize, k: usize) -> PropResult {
    let mut s = SamplerStream::new(SamplerKind::ScrambledHalton, seed, d).unwrap();
    let mut seen = Vec::new();
    for _ in 0..k {
        seen.extend(gaussian_batch(&mut s, &vec![0.0; d], 0.5, n).unwrap().indices);
    }
    prop_assert_eq!(seen, (1..=(n * k) as u64).collect::<Vec<_>>());
    Ok(())
}

/// Dyadic `u = j 2^-53`, for which `1 - u` is exact.
pub fn dyadic_unit() -> impl Strategy<Value = f64> {
    (1u64..(1u64 << 52)).prop_map(|j| j as f64 * 2f64.powi(-53))
}

pub fn cdf_symmetry(u: f64) -> PropResult {
    let s = inverse_normal_cdf(u).unwrap() + inverse_normal_cdf(1.0 - u).unwrap();
    prop_assert!(s.abs() <= 1e-9, "u={u}: sum {s}");
    Ok(())
}

fn variants() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Original), Just(Variant::OriginalNaive), Just(Variant::Stable)]
}

/// Runs every property with `cases` cases each; returns name and outcome.
pub fn run_all(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    let cfg = Config { cases, failure_persistence: None, ..Config::default() };
    let mut out = Vec::new();
    macro_rules! go {
        ($name:expr, $strategy:expr, $body:expr) => {
            out.push(($name, TestRunner::new(cfg.clone()).run(&$strategy, $body).map_err(|e| e.to_string())))
        };
    }
    go!("shift invariance", (points_and_exponents(30, 5), -1e3f64..1e3), |((p, g), c)| shift_invariance(p, g, c));
    go!("permutation invariance", (points_and_exponents(30, 5), any::<u64>()), |((p, g), s)| {
        permutation_invariance(p, g, s)
    });
    go!("convex-hull containment", (points_and_exponents(30, 4), 1usize..120, variants()), |((p, _), k, v)| {
        hull_containment(p, k, v)
    });
    go!("variant equivalence pre-underflow", (any::<u64>(), 1usize..4, 2usize..30, 1usize..80), |(s, d, n, i)| {
        variant_equivalence(s, d, n, i)
    });
    go!(
        "stable variant finite over 200 iterations",
        (0u64..1000, 1usize..4, prop_oneof![Just(SamplerKind::PseudoRandom), Just(SamplerKind::ScrambledHalton)]),
        |(s, d, k)| stable_stays_finite(s, d, k)
    );
    go!("sigma schedule exact", (any::<u64>(), 0.05f64..0.999, 0.05f64..5.0, 0usize..80), |(s, r, l, i)| {
        sigma_schedule(s, r, l, i)
    });
    go!("halton non-repetition", (any::<u64>(), 1usize..8, 1usize..50, 1usize..20), |(s, d, n, k)| {
        halton_non_repetition(s, d, n, k)
    });
    go!("inverse-CDF symmetry", dyadic_unit(), cdf_symmetry);
    out
}
