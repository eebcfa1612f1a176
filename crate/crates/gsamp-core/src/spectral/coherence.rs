//! Randomized estimation of squared local coherences without any
//! eigendecomposition.
//!
//! Two ingredients: (a) eigenvalue counting by filtering random Gaussian
//! vectors through a low-pass step and measuring retained energy, and (b) a
//! dichotomy on the cutoff `λ` that stops once the count lands in
//! `[s, (1+ε)s]` or the bracket is narrower than `ε·λ_max_bound`. The
//! squared coherence of each vertex is then the mean squared value of
//! filtered random probes at that vertex, normalized so the total matches the
//! eigencount estimate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::Laplacian;
use crate::rng::{mix, rng_from, tag};
use crate::spectral::chebyshev::design_lowpass;
use crate::spectral::oracle::EigenOracle;
use crate::spectral::{default_eigencount_projections, DEFAULT_FILTER_DEGREE};

/// Probe distribution for the coherence pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionDistribution {
    /// ±1 entries; lower variance for diagonal-energy estimates (default).
    SignedBernoulli,
    /// Standard normal entries.
    Gaussian,
}

/// Tuning knobs for [`estimate_coherence_with`].
#[derive(Debug, Clone)]
pub struct CoherenceOptions {
    /// Projection constant: the coherence pass uses `⌈c·s·ln s⌉` probes.
    pub c: f64,
    /// Dichotomy tolerance: target count band `[s, (1+ε)s]` and bracket-width
    /// exit at `ε·λ_max_bound`.
    pub epsilon: f64,
    /// Chebyshev degree of every filter involved.
    pub degree: usize,
    /// Overrides the `⌈c·s·ln s⌉` probe count for the coherence pass.
    pub n_projections_override: Option<usize>,
    /// Probe count per eigencount evaluation inside the dichotomy
    /// (default `⌈10·ln n⌉`).
    pub eigencount_projections: Option<usize>,
    pub distribution: ProjectionDistribution,
}

impl Default for CoherenceOptions {
    fn default() -> Self {
        Self {
            c: super::DEFAULT_PROJECTION_CONSTANT,
            epsilon: super::DEFAULT_DICHOTOMY_EPSILON,
            degree: DEFAULT_FILTER_DEGREE,
            n_projections_override: None,
            eigencount_projections: None,
            distribution: ProjectionDistribution::SignedBernoulli,
        }
    }
}

/// Per-vertex squared coherence estimates plus the cutoff search diagnostics.
#[derive(Debug, Clone)]
pub struct CoherenceProfile {
    /// Estimate of `‖d_v‖²` per vertex, clamped to `[0, 1.1]`.
    pub sq_coherence: Vec<f64>,
    /// Cutoff the dichotomy settled on.
    pub lambda_s: f64,
    /// Probes used by the coherence pass (0 for the exact variant).
    pub n_projections: usize,
    /// False only when the dichotomy exhausted its 50-step budget.
    pub converged: bool,
    /// Eigencount evaluations performed by the cutoff search.
    pub t1_iterations: usize,
    /// Estimated number of eigenvalues at or below `lambda_s`.
    pub eigencount_estimate: f64,
}

impl CoherenceProfile {
    /// Exact squared coherences for the first `f` frequencies via the dense
    /// oracle. Entries sum to `f` to floating-point accuracy.
    pub fn exact_prefix(oracle: &EigenOracle, f: usize) -> Result<Self> {
        if f == 0 || f > oracle.n() {
            return Err(Error::InvalidParameter(format!(
                "band width must be in [1, {}], got {f}",
                oracle.n()
            )));
        }
        Ok(Self {
            sq_coherence: oracle.sq_coherence_prefix(f),
            lambda_s: oracle.eigenvalues()[f - 1],
            n_projections: 0,
            converged: true,
            t1_iterations: 0,
            eigencount_estimate: f as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.sq_coherence.len()
    }

    /// Total estimated coherence mass (≈ the band size).
    pub fn total(&self) -> f64 {
        self.sq_coherence.iter().sum()
    }
}

/// Columns are generated and filtered in fixed-size blocks to bound memory.
/// Sized so the probe counts in play (`⌈10·ln n⌉` and small `⌈c·s·ln s⌉`
/// targets) usually fit one block, keeping it to one CSR sweep per
/// polynomial term.
const PROBE_BLOCK: usize = 128;

fn fill_probe(rng: &mut impl Rng, dist: ProjectionDistribution, out: &mut [f64]) {
    match dist {
        ProjectionDistribution::SignedBernoulli => {
            for x in out {
                *x = if rng.random::<bool>() { 1.0 } else { -1.0 };
            }
        }
        ProjectionDistribution::Gaussian => {
            for x in out {
                *x = StandardNormal.sample(rng);
            }
        }
    }
}

/// Estimates `#{eigenvalues ≤ λ}` with the default filter degree.
pub fn eigencount_below(lap: &Laplacian, lambda: f64, n_projections: usize, seed: u64) -> Result<f64> {
    eigencount_below_with_degree(lap, lambda, n_projections, DEFAULT_FILTER_DEGREE, seed)
}

/// Estimates `#{eigenvalues ≤ λ}` as the mean retained energy
/// `‖h_λ(L)z‖²` over Gaussian probes `z`. Cutoffs above the spectral interval
/// are clamped to its end (the count then approaches `n`).
pub fn eigencount_below_with_degree(
    lap: &Laplacian,
    lambda: f64,
    n_projections: usize,
    degree: usize,
    seed: u64,
) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eigencount cutoff must be positive, got {lambda}"
        )));
    }
    if n_projections == 0 {
        return Err(Error::InvalidParameter(
            "eigencount needs at least one projection".into(),
        ));
    }
    let b = lap.lambda_max_bound();
    let filter = design_lowpass(lambda.min(b), degree, b)?;
    let n = lap.n();
    let mut rng = rng_from(seed);
    let mut total = 0.0;
    let mut remaining = n_projections;
    let mut block = vec![0.0; n * PROBE_BLOCK.min(n_projections)];
    while remaining > 0 {
        let cols = PROBE_BLOCK.min(remaining);
        let chunk = &mut block[..n * cols];
        fill_probe(&mut rng, ProjectionDistribution::Gaussian, chunk);
        filter.apply_multi(lap, chunk, n);
        total += chunk.iter().map(|&y| y * y).sum::<f64>();
        remaining -= cols;
    }
    Ok(total / n_projections as f64)
}

/// Coherence estimation with the default options modulated by the positional
/// parameters `c` (projection constant), `epsilon` (dichotomy tolerance) and
/// `degree` (filter order).
pub fn estimate_coherence(
    lap: &Laplacian,
    s: usize,
    c: f64,
    epsilon: f64,
    degree: usize,
    seed: u64,
) -> Result<CoherenceProfile> {
    estimate_coherence_with(
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

/// Estimates the squared local coherence profile for a target of `s` samples.
///
/// Stage one searches for a cutoff `λ_s` whose eigencount lands in
/// `[s, (1+ε)s]` (dichotomy on `(0, λ_max_bound]`, at most 50 evaluations,
/// bracket-width exit at `ε·λ_max_bound`). Stage two filters `⌈c·s·ln s⌉`
/// random probes through the step at `λ_s` and averages their squared values
/// per vertex, then rescales so the total equals the eigencount estimate.
/// Fixed seeds give identical profiles across runs and thread counts.
pub fn estimate_coherence_with(
    lap: &Laplacian,
    s: usize,
    opts: &CoherenceOptions,
    seed: u64,
) -> Result<CoherenceProfile> {
    let n = lap.n();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "sample target must be in [1, {n}], got {s}"
        )));
    }
    if !(opts.epsilon.is_finite() && opts.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dichotomy tolerance must be positive, got {}",
            opts.epsilon
        )));
    }
    if !(opts.c.is_finite() && opts.c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "projection constant must be positive, got {}",
            opts.c
        )));
    }
    let b = lap.lambda_max_bound();
    let count_probes = opts
        .eigencount_projections
        .unwrap_or_else(|| default_eigencount_projections(n));
    let count_seed_base = mix(seed, tag::EIGENCOUNT);
    let target_lo = s as f64;
    let target_hi = (1.0 + opts.epsilon) * s as f64;

    let mut t1 = 0usize;
    let count_at = |lambda: f64, t1: &mut usize| -> Result<f64> {
        let c = eigencount_below_with_degree(
            lap,
            lambda,
            count_probes,
            opts.degree,
            mix(count_seed_base, *t1 as u64),
        )?;
        *t1 += 1;
        Ok(c)
    };

    // The upper end of the interval always counts (approximately) all n
    // eigenvalues, so it brackets any s ≤ n from above. Probing it first
    // settles the s ≈ n case immediately.
    let mut lo = 0.0;
    let mut hi = b;
    let mut count_hi = count_at(hi, &mut t1)?;
    let mut converged = true;
    if count_hi > target_hi {
        loop {
            if t1 >= 50 {
                converged = false;
                break;
            }
            if (hi - lo) <= opts.epsilon * b {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let count_mid = count_at(mid, &mut t1)?;
            if count_mid < target_lo {
                lo = mid;
            } else {
                hi = mid;
                count_hi = count_mid;
                if count_mid <= target_hi {
                    break;
                }
            }
        }
    }
    let lambda_s = hi;
    let eigencount_estimate = count_hi;

    // Stage two: diagonal energies of the projector approximation at λ_s.
    let r = opts.n_projections_override.unwrap_or_else(|| {
        ((opts.c * s as f64 * (s as f64).ln()).ceil() as usize).max(1)
    });
    let filter = design_lowpass(lambda_s, opts.degree, b)?;
    let mut rng = rng_from(mix(seed, tag::COHERENCE));
    let mut sq = vec![0.0; n];
    let mut remaining = r;
    let mut block = vec![0.0; n * PROBE_BLOCK.min(r)];
    while remaining > 0 {
        let cols = PROBE_BLOCK.min(remaining);
        let chunk = &mut block[..n * cols];
        fill_probe(&mut rng, opts.distribution, chunk);
        filter.apply_multi(lap, chunk, n);
        for col in chunk.chunks_exact(n) {
            for (acc, &y) in sq.iter_mut().zip(col) {
                *acc += y * y;
            }
        }
        remaining -= cols;
    }
    let total: f64 = sq.iter().sum();
    let scale = if total > 0.0 { eigencount_estimate / total } else { 0.0 };
    for v in sq.iter_mut() {
        *v = (*v * scale).clamp(0.0, 1.1);
    }
    Ok(CoherenceProfile {
        sq_coherence: sq,
        lambda_s,
        n_projections: r,
        converged,
        t1_iterations: t1,
        eigencount_estimate,
    })
}
