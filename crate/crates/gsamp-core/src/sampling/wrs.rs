//! Weighted random sampling: i.i.d. draws proportional to squared coherence.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::Distribution;

use crate::error::{Error, Result};
use crate::rng::{mix, rng_from, tag};
use crate::spectral::CoherenceProfile;

use super::{params_map, Method, SamplingResult};

/// Draws `s` vertices with replacement, `p(v) ∝ sq_coherence(v)`.
///
/// The per-iteration score is the probability of the drawn vertex, and the
/// full distribution is kept on the result for weighted reconstruction.
pub fn wrs_sample(profile: &CoherenceProfile, s: usize, seed: u64) -> Result<SamplingResult> {
    let t0 = Instant::now();
    if s == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let total = profile.total();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidInput(
            "coherence profile has no positive mass to sample from".into(),
        ));
    }
    let p: Vec<f64> = profile.sq_coherence.iter().map(|&c| c / total).collect();
    let index = WeightedIndex::new(&p)
        .map_err(|e| Error::InvalidInput(format!("invalid sampling weights: {e}")))?;
    let mut rng = rng_from(mix(seed, tag::WRS));
    let mut vertices = Vec::with_capacity(s);
    let mut scores = Vec::with_capacity(s);
    for _ in 0..s {
        let v = index.sample(&mut rng);
        vertices.push(v);
        scores.push(p[v]);
    }
    Ok(SamplingResult {
        method: Method::Wrs,
        vertices,
        scores,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        params: params_map([
            ("s", s.to_string()),
            ("seed", seed.to_string()),
            ("lambda_s", profile.lambda_s.to_string()),
        ]),
        probabilities: Some(p),
        flags: vec![],
    })
}
