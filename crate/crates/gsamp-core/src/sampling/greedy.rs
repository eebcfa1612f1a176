//! Exact greedy D-optimal selection via dense spectral projections.
//!
//! Each step maximizes the multiplicative determinant update
//! `‖d_v‖² − d_vᵀ D (DᵀD)⁻¹ Dᵀ d_v`, so the product of the per-iteration
//! scores is the squared volume `det(DᵀD)` of the selected deltas.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::{exact_filtered_delta, EigenOracle};

use super::{argmax_unselected, params_map, Method, SamplingResult};

/// Relative singular-value cutoff for the Gram pseudo-inverse.
const PINV_CUTOFF: f64 = 1e-10;

/// Greedy squared-volume maximization over the frequency set `r_set`
/// (0-based indices into the ascending eigenvalue order).
pub fn exact_greedy_sample(
    oracle: &EigenOracle,
    s: usize,
    r_set: &[usize],
) -> Result<SamplingResult> {
    let t0 = Instant::now();
    let n = oracle.n();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "sample count must be in [1, {n}], got {s}"
        )));
    }
    if r_set.is_empty() {
        return Err(Error::InvalidParameter("frequency set is empty".into()));
    }
    if let Some(&bad) = r_set.iter().find(|&&j| j >= n) {
        return Err(Error::InvalidParameter(format!(
            "frequency index {bad} out of range for {n} vertices"
        )));
    }

    let deltas: Vec<DVector<f64>> = (0..n)
        .map(|v| DVector::from_vec(exact_filtered_delta(oracle, r_set, v)))
        .collect();
    let norms_sq: Vec<f64> = deltas.iter().map(|d| d.norm_squared()).collect();

    let mut selected_mask = vec![false; n];
    let mut vertices: Vec<usize> = Vec::with_capacity(s);
    let mut scores = Vec::with_capacity(s);
    let mut flags = Vec::new();

    let deltas_ref = &deltas;
    let norms_ref = &norms_sq;
    for iter in 0..s {
        let score_of: Box<dyn Fn(usize) -> f64 + '_> = if vertices.is_empty() {
            Box::new(|v| norms_ref[v])
        } else {
            let m = vertices.len();
            let d_mat = DMatrix::from_fn(n, m, |i, j| deltas_ref[vertices[j]][i]);
            let gram = d_mat.tr_mul(&d_mat);
            let svd = gram.svd(true, true);
            let sigma_max = svd.singular_values.max();
            let eps = PINV_CUTOFF * sigma_max;
            if svd.singular_values.iter().any(|&sv| sv <= eps) {
                flags.push(format!("rank_deficient_gram@iter={iter}"));
            }
            let pinv = svd
                .pseudo_inverse(eps)
                .map_err(|e| Error::InvalidInput(format!("Gram pseudo-inverse failed: {e}")))?;
            Box::new(move |v| {
                let proj = d_mat.tr_mul(&deltas_ref[v]);
                norms_ref[v] - (&pinv * &proj).dot(&proj)
            })
        };
        let v = argmax_unselected(n, &selected_mask, |v| score_of(v))
            .expect("s ≤ n leaves an unselected candidate");
        scores.push(score_of(v));
        selected_mask[v] = true;
        vertices.push(v);
    }

    Ok(SamplingResult {
        method: Method::ExactGreedy,
        vertices,
        scores,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        params: params_map([
            ("s", s.to_string()),
            ("r_size", r_set.len().to_string()),
        ]),
        probabilities: None,
        flags,
    })
}
