//! Adversarial sampling on the unit L1 sphere and Monte-Carlo slab
//! probabilities.
//!
//! A sample is drawn by picking a uniform sign pattern σ (an orthant facet),
//! perturbing the facet center σ/d inside the facet hyperplane with scaled
//! Gaussian noise, and rejecting draws that leave the facet. The scale
//! `c_d = sqrt(1 / (4 ln(4d)))` (natural log, from the Gaussian tail bound)
//! keeps the per-draw acceptance probability at least 1/2.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 10_000;

/// One accepted point on `{x : ||x||_1 = 1}` with its generating data.
#[derive(Debug, Clone, PartialEq)]
pub struct L1SphereSample {
    /// Facet sign pattern σ with entries ±1.
    pub sign_pattern: Vec<f64>,
    /// The Gaussian draw behind the accepted point.
    pub gaussian: Vec<f64>,
    /// Noise scale `c_d`.
    pub scale: f64,
    /// The point v itself; `||v||_1 = 1` and `v_i σ_i >= 0`.
    pub point: Vec<f64>,
    /// Rejection-loop draws consumed to produce this sample.
    pub attempts: usize,
}

/// `c_d = sqrt(1 / (4 ln(4d)))`.
pub fn facet_noise_scale(d: usize) -> f64 {
    (1.0 / (4.0 * (4.0 * d as f64).ln())).sqrt()
}

/// Draw one sample using the supplied generator.
pub fn sample_l1_sphere(d: usize, rng: &mut ChaCha8Rng) -> Result<L1SphereSample> {
    if d < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    let c_d = facet_noise_scale(d);
    let df = d as f64;
    for attempt in 1..=MAX_ATTEMPTS {
        let sigma: Vec<f64> =
            (0..d).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let noise: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let dot: f64 = sigma.iter().zip(&noise).map(|(s, n)| s * n).sum();
        // v = (sigma + c_d (I - sigma sigma^T / d) noise) / d
        let point: Vec<f64> = sigma
            .iter()
            .zip(&noise)
            .map(|(s, n)| (s + c_d * (n - dot * s / df)) / df)
            .collect();
        let on_facet = point.iter().zip(&sigma).all(|(v, s)| v * s >= 0.0);
        if on_facet {
            return Ok(L1SphereSample {
                sign_pattern: sigma,
                gaussian: noise,
                scale: c_d,
                point,
                attempts: attempt,
            });
        }
    }
    Err(Error::RejectionLimit(MAX_ATTEMPTS))
}

/// Seeded convenience wrapper around [`sample_l1_sphere`].
pub fn l1_sphere_sampler(d: usize, seed: u64) -> Result<L1SphereSample> {
    sample_l1_sphere(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Monte-Carlo estimate with a 95% binomial confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabEstimate {
    pub estimate: f64,
    pub ci_halfwidth: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Estimate `Pr(<w, v> in [1 - eps, 1])` under the facet sampler.
///
/// Work is sharded over a fixed number of independent generator streams, so
/// the result is identical regardless of thread schedule.
pub fn slab_probability(
    w: &[f64],
    eps: f64,
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<SlabEstimate> {
    if w.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "weight vector has {} coordinates, expected {d}",
            w.len()
        )));
    }
    if samples < 1_000 {
        return Err(Error::InvalidParameter("need at least 1000 samples".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter("slab width must lie in (0, 1)".into()));
    }
    const SHARDS: u64 = 64;
    let per_shard = samples / SHARDS;
    let remainder = samples % SHARDS;
    let hits: u64 = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = per_shard + if shard < remainder { 1 } else { 0 };
            let mut hits = 0u64;
            for _ in 0..count {
                let v = sample_l1_sphere(d, &mut rng).expect("rejection loop bounded");
                let dot: f64 = w.iter().zip(&v.point).map(|(a, b)| a * b).sum();
                if (1.0 - eps..=1.0).contains(&dot) {
                    hits += 1;
                }
            }
            Ok::<u64, Error>(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = hits as f64 / samples as f64;
    let ci = 1.96 * (p * (1.0 - p) / samples as f64).sqrt();
    Ok(SlabEstimate { estimate: p, ci_halfwidth: ci, hits, samples })
}
