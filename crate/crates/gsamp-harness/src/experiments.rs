//! The experiment drivers: SNR sweeps, timing sweeps, the diagonal-energy
//! diagnostic, and the classification run.
//!
//! Seeds are derived, never shared: every (model, size, trial) instance mixes
//! its own stream out of `seed_base`, and every method call on that instance
//! mixes again, so reordering the sweep or running trials on worker threads
//! cannot change any row's content.

use std::time::Instant;

use gsamp_core::graph::{build_knn_graph_from_points, gen_signal_with_powers, SyntheticSignal};
use gsamp_core::reconstruct::indicator_matrix;
use gsamp_core::rng::{mix, rng_from, tag};
use gsamp_core::sampling::{
    avm_kernel_sample_with, avm_sample_exact, avm_sample_with, dc_sample, exact_greedy_sample,
    sp_finite_k_sample, sp_ideal_sample, wrs_sample, Method, SamplingResult,
};
use gsamp_core::spectral::estimate_coherence_with;
use gsamp_core::{
    classify_one_vs_all, reconstruct, snr_db, wrs_weights, EigenOracle, Laplacian,
    LaplacianKind, ReconstructionSpec, SparseGraph,
};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::{ExperimentConfig, GraphModel};
use crate::report::{ExperimentReport, ReportRow};
use crate::{HarnessError, Result};

/// Seed for one (model, size, trial) instance: the graph draw, the signal
/// draw, and every method seed hang off this value.
fn instance_seed(seed_base: u64, model_idx: usize, n: usize, trial: usize) -> u64 {
    let a = mix(seed_base, tag::TRIAL);
    let b = mix(a, model_idx as u64);
    let c = mix(b, n as u64);
    mix(c, trial as u64)
}

/// Seed for one method call within an instance.
fn method_seed(instance: u64, method_idx: usize, s: usize) -> u64 {
    let a = mix(instance, tag::METHOD);
    let b = mix(a, method_idx as u64);
    mix(b, s as u64)
}

/// Runs one sampler with the configured options. Wall-clock in the result
/// covers everything the method needs at selection time — coherence
/// estimation included — so timings are comparable across methods.
///
/// `oracle` is only required by the dense reference methods (`sp_ideal`,
/// `exact_greedy`, `avm_exact`); the scalable ones never touch it.
pub fn sample_once(
    cfg: &ExperimentConfig,
    method: Method,
    g: &SparseGraph,
    lap: &Laplacian,
    oracle: Option<&EigenOracle>,
    s: usize,
    seed: u64,
) -> Result<SamplingResult> {
    let opts = cfg.coherence_options(lap.n(), s);
    fn need_oracle<'a>(
        oracle: Option<&'a EigenOracle>,
        method: Method,
    ) -> Result<&'a EigenOracle> {
        oracle.ok_or_else(|| {
            HarnessError::Config(format!(
                "method {method} needs the dense spectral oracle, which this run skipped"
            ))
        })
    }
    let result = match method {
        Method::Wrs => {
            let t0 = Instant::now();
            let profile = estimate_coherence_with(lap, s, &opts, seed)?;
            let mut r = wrs_sample(&profile, s, seed)?;
            r.elapsed_seconds = t0.elapsed().as_secs_f64();
            r
        }
        Method::Dc => {
            let t0 = Instant::now();
            let profile = estimate_coherence_with(lap, s, &opts, seed)?;
            let mut r = dc_sample(g, &profile, s, cfg.dc_delta)?;
            r.elapsed_seconds = t0.elapsed().as_secs_f64();
            r
        }
        Method::Avm => avm_sample_with(lap, s, &opts, seed)?,
        Method::AvmKernel => {
            avm_kernel_sample_with(lap, s, &cfg.kernel_spec()?, &opts, seed)?
        }
        Method::SpFiniteK => sp_finite_k_sample(lap, s, cfg.sp_k_power)?,
        Method::SpIdeal => sp_ideal_sample(need_oracle(oracle, method)?, s)?,
        Method::ExactGreedy => {
            let band: Vec<usize> = (0..cfg.f.min(lap.n())).collect();
            exact_greedy_sample(need_oracle(oracle, method)?, s, &band)?
        }
        Method::AvmExact => avm_sample_exact(need_oracle(oracle, method)?, s)?,
    };
    Ok(result)
}

/// The reconstruction spec a sweep uses for one sampling result: WRS rows get
/// probability-inverse weights, everything else plain least squares.
fn recon_spec_for(sampling: &SamplingResult, f: usize) -> Result<ReconstructionSpec> {
    if sampling.method == Method::Wrs {
        if let Some(p) = &sampling.probabilities {
            let drawn: Vec<f64> = sampling.vertices.iter().map(|&v| p[v]).collect();
            return Ok(ReconstructionSpec::weighted(f, wrs_weights(&drawn)?));
        }
    }
    Ok(ReconstructionSpec::plain(f))
}

/// Least-squares reconstruction of `signal` from the sampled vertices.
/// Returns (SNR of the reconstruction against the noisy signal, seconds).
fn reconstruct_and_score(
    oracle: &EigenOracle,
    f: usize,
    sampling: &SamplingResult,
    signal: &SyntheticSignal,
) -> Result<(f64, f64)> {
    let t0 = Instant::now();
    let spec = recon_spec_for(sampling, f)?;
    let observed: Vec<f64> = sampling.vertices.iter().map(|&v| signal.noisy[v]).collect();
    let rec = reconstruct(oracle, &spec, &sampling.vertices, &observed)?;
    let elapsed = t0.elapsed().as_secs_f64();
    Ok((snr_db(&signal.noisy, &rec.x_hat), elapsed))
}

fn failed_row(
    model: GraphModel,
    n: usize,
    s: usize,
    method: Method,
    trial: usize,
) -> ReportRow {
    ReportRow {
        model: model.as_str().to_string(),
        n,
        s,
        method: method.as_str().to_string(),
        trial,
        snr_db: f64::NAN,
        sample_time_s: f64::NAN,
        recon_time_s: f64::NAN,
        source: "run".to_string(),
    }
}

/// One SNR-sweep instance: fresh graph, fresh signal, every (s, method) cell.
fn run_one_snr_instance(
    cfg: &ExperimentConfig,
    methods: &[Method],
    model_idx: usize,
    model: GraphModel,
    n: usize,
    trial: usize,
) -> Result<(Vec<ReportRow>, Vec<String>)> {
    let iseed = instance_seed(cfg.seed_base, model_idx, n, trial);
    let g = cfg.build_graph(model, n, mix(iseed, tag::GRAPH))?;
    let lap = g.laplacian(cfg.laplacian_kind()?);
    let oracle = EigenOracle::new(&lap)?;
    let signal = gen_signal_with_powers(&oracle, cfg.f, cfg.signal_power, cfg.noise_power, iseed)?;

    let mut rows = Vec::new();
    let mut logs = Vec::new();
    for &s in &cfg.s_list {
        for (mi, &method) in methods.iter().enumerate() {
            let mseed = method_seed(iseed, mi, s);
            let outcome = sample_once(cfg, method, &g, &lap, Some(&oracle), s, mseed).and_then(
                |sampling| {
                    let (snr, recon_t) = reconstruct_and_score(&oracle, cfg.f, &sampling, &signal)?;
                    Ok((sampling.elapsed_seconds, snr, recon_t, sampling.flags))
                },
            );
            match outcome {
                Ok((sample_t, snr, recon_t, flags)) => {
                    if !flags.is_empty() {
                        logs.push(format!(
                            "flagged: model={model} n={n} s={s} method={method} trial={trial}: {}",
                            flags.join(";")
                        ));
                    }
                    rows.push(ReportRow {
                        model: model.as_str().to_string(),
                        n,
                        s,
                        method: method.as_str().to_string(),
                        trial,
                        snr_db: snr,
                        sample_time_s: sample_t,
                        recon_time_s: recon_t,
                        source: "run".to_string(),
                    });
                }
                Err(e) => {
                    logs.push(format!(
                        "failed: model={model} n={n} s={s} method={method} trial={trial}: {e}"
                    ));
                    rows.push(failed_row(model, n, s, method, trial));
                }
            }
        }
    }
    Ok((rows, logs))
}

/// SNR-vs-samples sweep. Each (model, n, trial) instance draws a fresh graph
/// and a fresh bandlimited-plus-noise signal, runs every configured method at
/// every sample budget, reconstructs with bandwidth `f`, and records SNR and
/// times. A method failure keeps its row (NaN metrics) and the run continues,
/// so the report always holds |models|·|n_list|·|s_list|·|methods|·trials
/// rows. Trials run on worker threads when the `parallel` feature is on; row
/// order and content do not depend on that.
pub fn run_snr_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut logs = cfg.validate()?.into_iter().map(|w| format!("warning: {w}")).collect::<Vec<_>>();
    let methods = cfg.parse_methods()?;
    let models = cfg.parse_models()?;

    let mut tasks = Vec::new();
    for (model_idx, &model) in models.iter().enumerate() {
        for &n in &cfg.n_list {
            for trial in 0..cfg.trials {
                tasks.push((model_idx, model, n, trial));
            }
        }
    }

    let run_task = |&(model_idx, model, n, trial): &(usize, GraphModel, usize, usize)| {
        run_one_snr_instance(cfg, &methods, model_idx, model, n, trial)
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<Result<(Vec<ReportRow>, Vec<String>)>> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run_task).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Result<(Vec<ReportRow>, Vec<String>)>> = tasks.iter().map(run_task).collect();

    let mut rows = Vec::new();
    for outcome in outcomes {
        let (r, l) = outcome?;
        rows.extend(r);
        logs.extend(l);
    }
    logs.push(format!(
        "snr-sweep: {} instances, {} rows",
        tasks.len(),
        rows.len()
    ));
    Ok(ExperimentReport { rows, logs })
}

/// Wall-clock timing sweep. One graph instance per (model, n) — every method
/// must be measured on identical inputs — and a fixed round-robin rotation:
/// within each iteration every method runs exactly once, in config order,
/// before any method runs again. The rotation is recorded in the log. Runs
/// strictly serially; timing excludes graph generation and signal synthesis
/// but includes coherence estimation inside each sampler. Reconstruction
/// (and the dense oracle it needs) is skipped when
/// `timing_skip_reconstruction` is set; SNR columns are then NaN.
pub fn run_timing_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut logs = cfg.validate()?.into_iter().map(|w| format!("warning: {w}")).collect::<Vec<_>>();
    let methods = cfg.parse_methods()?;
    let models = cfg.parse_models()?;
    let rotation = methods
        .iter()
        .map(|m| m.as_str())
        .collect::<Vec<_>>()
        .join(",");

    let mut rows = Vec::new();
    for (model_idx, &model) in models.iter().enumerate() {
        for &n in &cfg.n_list {
            let iseed = instance_seed(cfg.seed_base, model_idx, n, 0);
            let g = cfg.build_graph(model, n, mix(iseed, tag::GRAPH))?;
            let lap = g.laplacian(cfg.laplacian_kind()?);
            let oracle = if cfg.timing_skip_reconstruction {
                None
            } else {
                Some(EigenOracle::new(&lap)?)
            };
            for &s in &cfg.s_list {
                for trial in 0..cfg.trials {
                    logs.push(format!(
                        "round-robin: model={model} n={n} s={s} iteration={trial} order={rotation}"
                    ));
                    let signal = match &oracle {
                        Some(orc) => Some(gen_signal_with_powers(
                            orc,
                            cfg.f,
                            cfg.signal_power,
                            cfg.noise_power,
                            mix(iseed, trial as u64),
                        )?),
                        None => None,
                    };
                    for (mi, &method) in methods.iter().enumerate() {
                        let mseed = method_seed(mix(iseed, trial as u64), mi, s);
                        let outcome = sample_once(cfg, method, &g, &lap, oracle.as_ref(), s, mseed)
                            .and_then(|sampling| {
                                match (&oracle, &signal) {
                                    (Some(orc), Some(sig)) => {
                                        let (snr, recon_t) =
                                            reconstruct_and_score(orc, cfg.f, &sampling, sig)?;
                                        Ok((sampling.elapsed_seconds, snr, recon_t))
                                    }
                                    _ => Ok((sampling.elapsed_seconds, f64::NAN, f64::NAN)),
                                }
                            });
                        match outcome {
                            Ok((sample_t, snr, recon_t)) => rows.push(ReportRow {
                                model: model.as_str().to_string(),
                                n,
                                s,
                                method: method.as_str().to_string(),
                                trial,
                                snr_db: snr,
                                sample_time_s: sample_t,
                                recon_time_s: recon_t,
                                source: "run".to_string(),
                            }),
                            Err(e) => {
                                logs.push(format!(
                                    "failed: model={model} n={n} s={s} method={method} \
                                     trial={trial}: {e}"
                                ));
                                rows.push(failed_row(model, n, s, method, trial));
                            }
                        }
                    }
                }
            }
        }
    }
    logs.push(format!("timing-sweep: {} rows", rows.len()));
    Ok(ExperimentReport { rows, logs })
}

/// For each prefix `S_m = {S[0..m]}` of an ordered sample set, the fraction
/// of squared energy on the diagonal of the exact Gram matrix of the filtered
/// deltas spanned by the frequency set `r_set`:
/// `Σᵢ G_ii² / Σᵢⱼ G_ij²` with `G = (U_R U_Rᵀ)_{S_m, S_m}`.
///
/// A fraction of 1 means the selected deltas are orthogonal (the greedy's
/// ideal); the first prefix is exactly 1 by construction.
pub fn diag_energy_fraction(
    oracle: &EigenOracle,
    s_set: &[usize],
    r_set: &[usize],
) -> Result<Vec<f64>> {
    if s_set.is_empty() {
        return Err(HarnessError::Config("sample set is empty".into()));
    }
    if r_set.is_empty() {
        return Err(HarnessError::Config("frequency set is empty".into()));
    }
    let n = oracle.n();
    if let Some(&bad) = s_set.iter().find(|&&v| v >= n) {
        return Err(HarnessError::Config(format!(
            "vertex {bad} out of range for {n} vertices"
        )));
    }
    if let Some(&bad) = r_set.iter().find(|&&j| j >= n) {
        return Err(HarnessError::Config(format!(
            "frequency {bad} out of range for {n} vertices"
        )));
    }
    let u_sr = oracle.u_submatrix(s_set, r_set);
    let gram = &u_sr * u_sr.transpose();
    let s = s_set.len();
    let mut fractions = Vec::with_capacity(s);
    let mut diag_sq = 0.0;
    let mut total_sq = 0.0;
    for m in 0..s {
        // Grow the sums by the new row/column; G is symmetric.
        diag_sq += gram[(m, m)] * gram[(m, m)];
        total_sq += gram[(m, m)] * gram[(m, m)];
        for i in 0..m {
            total_sq += 2.0 * gram[(i, m)] * gram[(i, m)];
        }
        fractions.push(if total_sq > 0.0 { diag_sq / total_sq } else { 1.0 });
    }
    Ok(fractions)
}

/// One row of the classification report.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRow {
    pub resample: usize,
    pub n: usize,
    pub s: usize,
    pub method: String,
    /// Fraction of vertices whose one-vs-all label matches the ground truth;
    /// NaN when the method failed on this resample.
    pub accuracy: f64,
}

/// Classification accuracies plus the run log.
#[derive(Debug, Clone, Default)]
pub struct ClassificationReport {
    pub rows: Vec<ClassificationRow>,
    pub logs: Vec<String>,
}

impl ClassificationReport {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["resample", "n", "s", "method", "accuracy"])?;
        for r in &self.rows {
            w.write_record([
                &r.resample.to_string(),
                &r.n.to_string(),
                &r.s.to_string(),
                r.method.as_str(),
                &r.accuracy.to_string(),
            ])?;
        }
        w.flush().map_err(HarnessError::Io)?;
        Ok(())
    }

    /// Mean accuracy over resamples per (method, s), NaN-skipping.
    pub fn mean_accuracy(&self, method: &str, s: usize) -> f64 {
        let vals: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.s == s && r.accuracy.is_finite())
            .map(|r| r.accuracy)
            .collect();
        if vals.is_empty() {
            f64::NAN
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    }
}

/// Number of dataset resamples in a classification run.
pub const CLASSIFICATION_RESAMPLES: usize = 10;

/// Semi-supervised label recovery on a labeled point cloud.
///
/// Draws [`CLASSIFICATION_RESAMPLES`] random subsets of size
/// `min(n_list[0], points)`, builds the k-nearest-neighbor graph over each
/// subset with the **normalized** Laplacian, samples `s ∈ s_list` vertices,
/// observes the one-hot label indicators there, reconstructs each class
/// signal with bandwidth `f`, and assigns every vertex to the class with the
/// largest reconstructed value. Accuracy is measured over all subset
/// vertices. Labels must be 0-based class ids with at least two classes.
pub fn run_classification(
    cfg: &ExperimentConfig,
    points: &[Vec<f64>],
    labels: &[usize],
) -> Result<ClassificationReport> {
    if points.is_empty() {
        return Err(HarnessError::Core(gsamp_core::Error::InvalidInput(
            "empty point cloud".into(),
        )));
    }
    if labels.len() != points.len() {
        return Err(HarnessError::Core(gsamp_core::Error::InvalidInput(format!(
            "{} points but {} labels",
            points.len(),
            labels.len()
        ))));
    }
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    if n_classes < 2 {
        return Err(HarnessError::Core(gsamp_core::Error::InvalidInput(
            "need at least two classes".into(),
        )));
    }
    let methods = cfg.parse_methods()?;
    let mut logs = cfg.validate()?.into_iter().map(|w| format!("warning: {w}")).collect::<Vec<_>>();
    let subset_size = cfg.n_list[0].min(points.len());

    let mut rows = Vec::new();
    for resample in 0..CLASSIFICATION_RESAMPLES {
        let rseed = instance_seed(cfg.seed_base, 0, subset_size, resample);
        let mut indices: Vec<usize> = (0..points.len()).collect();
        indices.shuffle(&mut rng_from(mix(rseed, tag::GRAPH)));
        indices.truncate(subset_size);
        indices.sort_unstable();
        let sub_points: Vec<Vec<f64>> = indices.iter().map(|&i| points[i].clone()).collect();
        let sub_labels: Vec<usize> = indices.iter().map(|&i| labels[i]).collect();

        let g = build_knn_graph_from_points(&sub_points, cfg.knn_k)?;
        let lap = g.laplacian(LaplacianKind::Normalized);
        let oracle = EigenOracle::new(&lap)?;
        let n = g.n();
        let f = cfg.f.min(n);
        let label_mat = indicator_matrix(&sub_labels, n_classes)?;

        for &s_cfg in &cfg.s_list {
            let s = s_cfg.min(n);
            for (mi, &method) in methods.iter().enumerate() {
                let mseed = method_seed(rseed, mi, s);
                let outcome =
                    sample_once(cfg, method, &g, &lap, Some(&oracle), s, mseed).and_then(
                        |sampling| {
                            let spec = recon_spec_for(&sampling, f)?;
                            let predicted = classify_one_vs_all(
                                &oracle,
                                &spec,
                                &sampling.vertices,
                                &label_mat,
                            )?;
                            let correct = predicted
                                .iter()
                                .zip(&sub_labels)
                                .filter(|(p, t)| p == t)
                                .count();
                            Ok(correct as f64 / n as f64)
                        },
                    );
                let accuracy = match outcome {
                    Ok(a) => a,
                    Err(e) => {
                        logs.push(format!(
                            "failed: resample={resample} s={s} method={method}: {e}"
                        ));
                        f64::NAN
                    }
                };
                rows.push(ClassificationRow {
                    resample,
                    n,
                    s,
                    method: method.as_str().to_string(),
                    accuracy,
                });
            }
        }
    }
    logs.push(format!("classification: {} rows", rows.len()));
    Ok(ClassificationReport { rows, logs })
}

/// Synthetic labeled point cloud: `n_classes` isotropic Gaussian blobs in 2D,
/// centers on a circle of radius `separation`, unit within-class deviation.
/// Stand-in for a real labeled dataset in smoke tests and the CLI fallback.
pub fn gen_blob_points(
    n: usize,
    n_classes: usize,
    separation: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = rng_from(mix(seed, tag::GRAPH));
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % n_classes;
        let angle = 2.0 * std::f64::consts::PI * class as f64 / n_classes as f64;
        let (cy, cx) = angle.sin_cos();
        let dx: f64 = rng.sample(rand_distr::StandardNormal);
        let dy: f64 = rng.sample(rand_distr::StandardNormal);
        points.push(vec![separation * cx + dx, separation * cy + dy]);
        labels.push(class);
    }
    (points, labels)
}
