//! Distance-coherence sampling: greedy coherence maximization restricted to
//! vertices geodesically far from everything already selected.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{geodesic_from_set, SparseGraph};
use crate::spectral::CoherenceProfile;

use super::{argmax_unselected, params_map, Method, SamplingResult};

/// Selects `s` vertices: the first is the global coherence argmax; each later
/// pick maximizes coherence among vertices whose geodesic distance to the
/// selected set exceeds `delta` times the maximum such distance.
///
/// Unreachable vertices count as infinitely far, so when any exist they form
/// the candidate set by themselves. If the candidate set is empty (e.g.
/// `delta = 1`), the pick falls back to the unrestricted coherence argmax and
/// the result is flagged.
pub fn dc_sample(
    g: &SparseGraph,
    profile: &CoherenceProfile,
    s: usize,
    delta: f64,
) -> Result<SamplingResult> {
    let t0 = Instant::now();
    let n = g.n();
    if profile.n() != n {
        return Err(Error::InvalidInput(format!(
            "profile covers {} vertices but the graph has {n}",
            profile.n()
        )));
    }
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "sample count must be in [1, {n}], got {s}"
        )));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "distance fraction must lie in [0, 1], got {delta}"
        )));
    }
    let coh = &profile.sq_coherence;
    let mut selected_mask = vec![false; n];
    let mut vertices = Vec::with_capacity(s);
    let mut scores = Vec::with_capacity(s);
    let mut flags = Vec::new();

    let first = argmax_unselected(n, &selected_mask, |v| coh[v])
        .expect("nonempty graph has an argmax");
    selected_mask[first] = true;
    vertices.push(first);
    scores.push(coh[first]);

    while vertices.len() < s {
        let field = geodesic_from_set(g, &vertices)?;
        let mut dmax = 0.0f64;
        for v in 0..n {
            if !selected_mask[v] {
                dmax = dmax.max(field.distance(v));
            }
        }
        let candidate = if dmax.is_infinite() {
            // Unreachable vertices are farther than any finite distance.
            argmax_unselected(n, &selected_mask, |v| {
                if field.distance(v).is_infinite() {
                    coh[v]
                } else {
                    f64::NAN
                }
            })
        } else {
            let threshold = delta * dmax;
            argmax_unselected(n, &selected_mask, |v| {
                if field.distance(v) > threshold {
                    coh[v]
                } else {
                    f64::NAN
                }
            })
        };
        let v = match candidate {
            Some(v) => v,
            None => {
                flags.push(format!("empty_candidate_fallback@iter={}", vertices.len()));
                argmax_unselected(n, &selected_mask, |v| coh[v])
                    .expect("unselected vertices remain")
            }
        };
        selected_mask[v] = true;
        vertices.push(v);
        scores.push(coh[v]);
    }

    Ok(SamplingResult {
        method: Method::Dc,
        vertices,
        scores,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        params: params_map([
            ("s", s.to_string()),
            ("delta", delta.to_string()),
            ("lambda_s", profile.lambda_s.to_string()),
        ]),
        probabilities: None,
        flags,
    })
}
