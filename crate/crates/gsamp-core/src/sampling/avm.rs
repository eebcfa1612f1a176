//! Approximate volume maximization.
//!
//! Greedy D-optimal selection driven by squared coherences and filtered
//! deltas. Each iteration picks the vertex maximizing
//! `‖d_v‖² − Σ_w d_w(v)²/‖d_w‖²` over the already-selected `w`; the penalty
//! sum is maintained incrementally, so one new filtered delta per iteration
//! is all the spectral work the update needs.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::Laplacian;
use crate::spectral::{
    design_lowpass, estimate_coherence_with, exact_filtered_delta, CoherenceOptions, EigenOracle,
};

use super::{argmax_unselected, params_map, Method, SamplingResult};

/// Incremental state of the volume-maximization greedy: the selected
/// vertices, their filtered deltas, and the accumulated per-vertex penalty
/// `Σ_w d_w(v)²/‖d_w‖²`.
#[derive(Debug, Clone)]
pub struct GreedyState {
    selected: Vec<usize>,
    d_selected: Vec<Vec<f64>>,
    norms_sq: Vec<f64>,
    running_penalty: Vec<f64>,
    selected_mask: Vec<bool>,
}

impl GreedyState {
    pub fn new(n: usize) -> Self {
        Self {
            selected: Vec::new(),
            d_selected: Vec::new(),
            norms_sq: Vec::new(),
            running_penalty: vec![0.0; n],
            selected_mask: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.running_penalty.len()
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// Filtered deltas of the selected vertices, in selection order.
    pub fn d_selected(&self) -> &[Vec<f64>] {
        &self.d_selected
    }

    /// Exact squared norms of the stored deltas.
    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }

    pub fn running_penalty(&self) -> &[f64] {
        &self.running_penalty
    }

    pub fn is_selected(&self, v: usize) -> bool {
        self.selected_mask[v]
    }

    /// Selection score of `v`: its squared coherence minus the penalty.
    pub fn score(&self, sq_coherence: &[f64], v: usize) -> f64 {
        sq_coherence[v] - self.running_penalty[v]
    }

    /// Lowest-index argmax of the score over unselected vertices.
    pub fn select_next(&self, sq_coherence: &[f64]) -> Option<usize> {
        argmax_unselected(self.n(), &self.selected_mask, |v| {
            self.score(sq_coherence, v)
        })
    }

    /// Records `v` with its freshly filtered delta and folds the delta into
    /// the penalty. The denominator is the exact squared norm of `d_v` (not
    /// an estimate), which makes the self-penalty of a selected vertex at
    /// least `‖d_v‖²` up to rounding and reselection effectively impossible.
    /// Penalty increments are squares, so the penalty never decreases.
    pub fn push(&mut self, v: usize, d_v: Vec<f64>) {
        assert_eq!(d_v.len(), self.n(), "delta length must match vertex count");
        assert!(!self.selected_mask[v], "vertex {v} already selected");
        let norm_sq: f64 = d_v.iter().map(|x| x * x).sum();
        let denom = norm_sq.max(f64::MIN_POSITIVE);
        for (penalty, &val) in self.running_penalty.iter_mut().zip(&d_v) {
            *penalty += val * val / denom;
        }
        self.selected_mask[v] = true;
        self.selected.push(v);
        self.norms_sq.push(norm_sq);
        self.d_selected.push(d_v);
    }
}

fn run_greedy(
    sq_coherence: &[f64],
    s: usize,
    mut filter_delta: impl FnMut(usize) -> Vec<f64>,
) -> (GreedyState, Vec<usize>, Vec<f64>) {
    let mut state = GreedyState::new(sq_coherence.len());
    let mut vertices = Vec::with_capacity(s);
    let mut scores = Vec::with_capacity(s);
    for _ in 0..s {
        let v = state
            .select_next(sq_coherence)
            .expect("s ≤ n leaves an unselected candidate");
        scores.push(state.score(sq_coherence, v));
        vertices.push(v);
        state.push(v, filter_delta(v));
    }
    (state, vertices, scores)
}

/// Volume-maximization sampling from the sparse Laplacian alone.
///
/// Estimates the coherence profile for a band of `s` frequencies
/// (`c` projections constant, `ε` dichotomy tolerance, degree-`d` filters),
/// then runs the greedy with filtered deltas from the low-pass at the
/// estimated cutoff. The reported time covers estimation and selection.
pub fn avm_sample(
    lap: &Laplacian,
    s: usize,
    c: f64,
    epsilon: f64,
    degree: usize,
    seed: u64,
) -> Result<SamplingResult> {
    avm_sample_with(
        lap,
        s,
        &CoherenceOptions {
            c,
            epsilon,
            degree,
            ..CoherenceOptions::default()
        },
        seed,
    )
}

/// [`avm_sample`] with full control over the estimation options.
pub fn avm_sample_with(
    lap: &Laplacian,
    s: usize,
    opts: &CoherenceOptions,
    seed: u64,
) -> Result<SamplingResult> {
    let t0 = Instant::now();
    let n = lap.n();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "sample count must be in [1, {n}], got {s}"
        )));
    }
    let profile = estimate_coherence_with(lap, s, opts, seed)?;
    let filter = design_lowpass(profile.lambda_s, opts.degree, lap.lambda_max_bound())?;
    let (_, vertices, scores) = run_greedy(&profile.sq_coherence, s, |v| {
        let mut delta = vec![0.0; n];
        delta[v] = 1.0;
        filter.apply(lap, &delta)
    });
    let mut flags = Vec::new();
    if !profile.converged {
        flags.push("dichotomy_budget_exhausted".to_string());
    }
    Ok(SamplingResult {
        method: Method::Avm,
        vertices,
        scores,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        params: params_map([
            ("s", s.to_string()),
            ("c", opts.c.to_string()),
            ("epsilon", opts.epsilon.to_string()),
            ("degree", opts.degree.to_string()),
            ("seed", seed.to_string()),
            ("lambda_s", profile.lambda_s.to_string()),
            ("t1_iterations", profile.t1_iterations.to_string()),
            ("n_projections", profile.n_projections.to_string()),
        ]),
        probabilities: None,
        flags,
    })
}

/// The same greedy with exact spectral projectors onto the first `s`
/// frequencies — no estimator noise, no seed. Reference implementation for
/// tests and desk-scale baselines.
pub fn avm_sample_exact(oracle: &EigenOracle, s: usize) -> Result<SamplingResult> {
    let t0 = Instant::now();
    let n = oracle.n();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "sample count must be in [1, {n}], got {s}"
        )));
    }
    let band: Vec<usize> = (0..s).collect();
    let sq_coherence = oracle.sq_coherence_prefix(s);
    let (_, vertices, scores) =
        run_greedy(&sq_coherence, s, |v| exact_filtered_delta(oracle, &band, v));
    Ok(SamplingResult {
        method: Method::AvmExact,
        vertices,
        scores,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        params: params_map([("s", s.to_string()), ("mode", "exact".to_string())]),
        probabilities: None,
        flags: vec![],
    })
}
