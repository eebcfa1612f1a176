//! Least-squares reconstruction of bandlimited signals from vertex samples,
//! SNR metrics, and one-vs-all classification on reconstructed indicators.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::EigenOracle;

/// Default relative singular-value cutoff for the pseudo-inverse.
pub const DEFAULT_PINV_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReconstructionMode {
    PlainLs,
    WeightedLs,
}

/// How to reconstruct: bandwidth (the first `f` frequencies), plain or
/// weighted least squares, and the pseudo-inverse cutoff.
#[derive(Debug, Clone)]
pub struct ReconstructionSpec {
    pub f: usize,
    pub mode: ReconstructionMode,
    /// Per-sample positive weights; required (and only allowed) in weighted
    /// mode.
    pub weights: Option<Vec<f64>>,
    /// Relative singular-value threshold, as a fraction of the largest.
    pub pinv_cutoff: f64,
}

impl ReconstructionSpec {
    pub fn plain(f: usize) -> Self {
        Self {
            f,
            mode: ReconstructionMode::PlainLs,
            weights: None,
            pinv_cutoff: DEFAULT_PINV_CUTOFF,
        }
    }

    pub fn weighted(f: usize, weights: Vec<f64>) -> Self {
        Self {
            f,
            mode: ReconstructionMode::WeightedLs,
            weights: Some(weights),
            pinv_cutoff: DEFAULT_PINV_CUTOFF,
        }
    }
}

/// A reconstructed signal with its spectral coefficients and a rank flag.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// Full-length reconstruction `x̂ = U_F x̃`.
    pub x_hat: Vec<f64>,
    /// Recovered spectral coefficients `x̃` (length `f`).
    pub coefficients: Vec<f64>,
    /// True when the sampled submatrix had numerical rank below `f`, so the
    /// pseudo-inverse dropped directions.
    pub rank_deficient: bool,
}

/// Least-squares reconstruction `x̂ = U_F (W^{1/2} U_{S,F})⁺ W^{1/2} f_S`.
///
/// `W` is the identity in plain mode and `diag(weights)` in weighted mode.
/// Sample vertices may repeat (weighted rows and duplicated rows are
/// equivalent in the normal equations). Rank deficiency is absorbed by the
/// pseudo-inverse and reported on the result rather than treated as an error.
pub fn reconstruct(
    oracle: &EigenOracle,
    spec: &ReconstructionSpec,
    s_set: &[usize],
    f_s: &[f64],
) -> Result<Reconstruction> {
    let n = oracle.n();
    if s_set.is_empty() {
        return Err(Error::InvalidInput("sample set is empty".into()));
    }
    if spec.f == 0 || spec.f > n {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must be in [1, {n}], got {}",
            spec.f
        )));
    }
    if f_s.len() != s_set.len() {
        return Err(Error::InvalidInput(format!(
            "{} observed values for {} sample vertices",
            f_s.len(),
            s_set.len()
        )));
    }
    if let Some(&bad) = s_set.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidInput(format!(
            "sample vertex {bad} out of range for {n} vertices"
        )));
    }
    if !(spec.pinv_cutoff.is_finite() && spec.pinv_cutoff >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pseudo-inverse cutoff must be nonnegative, got {}",
            spec.pinv_cutoff
        )));
    }
    let sqrt_w: Vec<f64> = match (spec.mode, &spec.weights) {
        (ReconstructionMode::PlainLs, None) => vec![1.0; s_set.len()],
        (ReconstructionMode::PlainLs, Some(_)) => {
            return Err(Error::InvalidParameter(
                "plain least squares takes no weights".into(),
            ))
        }
        (ReconstructionMode::WeightedLs, Some(w)) => {
            if w.len() != s_set.len() {
                return Err(Error::InvalidInput(format!(
                    "{} weights for {} samples",
                    w.len(),
                    s_set.len()
                )));
            }
            if let Some(&bad) = w.iter().find(|&&x| !(x.is_finite() && x > 0.0)) {
                return Err(Error::InvalidInput(format!(
                    "weights must be strictly positive, got {bad}"
                )));
            }
            w.iter().map(|&x| x.sqrt()).collect()
        }
        (ReconstructionMode::WeightedLs, None) => {
            return Err(Error::InvalidParameter(
                "weighted least squares needs weights".into(),
            ))
        }
    };

    let freqs: Vec<usize> = (0..spec.f).collect();
    let mut a = oracle.u_submatrix(s_set, &freqs);
    let mut rhs = DVector::from_column_slice(f_s);
    for (i, &sw) in sqrt_w.iter().enumerate() {
        for j in 0..spec.f {
            a[(i, j)] *= sw;
        }
        rhs[i] *= sw;
    }
    let svd = a.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let eps = spec.pinv_cutoff * sigma_max;
    let effective_rank = svd.singular_values.iter().filter(|&&sv| sv > eps).count();
    let rank_deficient = effective_rank < spec.f;
    let coeffs = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::InvalidInput(format!("least-squares solve failed: {e}")))?;
    let u_f = oracle.u().columns(0, spec.f);
    let x_hat_vec = u_f * &coeffs;
    Ok(Reconstruction {
        x_hat: x_hat_vec.iter().copied().collect(),
        coefficients: coeffs.iter().copied().collect(),
        rank_deficient,
    })
}

/// Weights `1/(s·p_v)` for weighted least squares after sampling with
/// replacement, from the draw probabilities of the sampled vertices.
pub fn wrs_weights(probabilities_of_samples: &[f64]) -> Result<Vec<f64>> {
    let s = probabilities_of_samples.len();
    if s == 0 {
        return Err(Error::InvalidInput("no sample probabilities given".into()));
    }
    probabilities_of_samples
        .iter()
        .map(|&p| {
            if p.is_finite() && p > 0.0 {
                Ok(1.0 / (s as f64 * p))
            } else {
                Err(Error::InvalidInput(format!(
                    "sample probability must be positive, got {p}"
                )))
            }
        })
        .collect()
}

/// `10·log₁₀(‖f‖² / ‖f̂ − f‖²)` in decibels.
///
/// An exact reconstruction returns `+∞`; an all-zero reference returns `−∞`
/// (its energy ratio is zero against any nonzero estimate).
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> f64 {
    assert_eq!(
        reference.len(),
        estimate.len(),
        "signals must have equal length"
    );
    let ref_energy: f64 = reference.iter().map(|x| x * x).sum();
    let err_energy: f64 = reference
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if err_energy == 0.0 {
        return if ref_energy == 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    if ref_energy == 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (ref_energy / err_energy).log10()
}

/// One-vs-all classification: reconstructs each class-indicator column of the
/// `n × C` label matrix from its values on `s_set`, then assigns each vertex
/// the class whose reconstruction is largest in magnitude (ties to the lowest
/// class index).
pub fn classify_one_vs_all(
    oracle: &EigenOracle,
    spec: &ReconstructionSpec,
    s_set: &[usize],
    label_signals: &DMatrix<f64>,
) -> Result<Vec<usize>> {
    let n = oracle.n();
    let c = label_signals.ncols();
    if label_signals.nrows() != n {
        return Err(Error::InvalidInput(format!(
            "label matrix has {} rows for {n} vertices",
            label_signals.nrows()
        )));
    }
    if c < 2 {
        return Err(Error::InvalidInput(format!(
            "one-vs-all needs at least 2 classes, got {c}"
        )));
    }
    let mut reconstructions = Vec::with_capacity(c);
    for class in 0..c {
        let observed: Vec<f64> = s_set.iter().map(|&v| label_signals[(v, class)]).collect();
        reconstructions.push(reconstruct(oracle, spec, s_set, &observed)?.x_hat);
    }
    Ok((0..n)
        .map(|v| {
            let mut best = 0usize;
            for class in 1..c {
                if reconstructions[class][v].abs() > reconstructions[best][v].abs() {
                    best = class;
                }
            }
            best
        })
        .collect())
}

/// Builds the `n × C` 0/1 indicator matrix from per-vertex class labels.
pub fn indicator_matrix(labels: &[usize], n_classes: usize) -> Result<DMatrix<f64>> {
    if n_classes < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 classes, got {n_classes}"
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(Error::InvalidInput(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }
    Ok(DMatrix::from_fn(labels.len(), n_classes, |i, j| {
        if labels[i] == j {
            1.0
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_sensor_knn, gen_signal_with_powers, LaplacianKind};
    use crate::sampling::avm_sample_exact;

    fn oracle30() -> EigenOracle {
        let g = gen_sensor_knn(30, 4, 13).unwrap();
        EigenOracle::new(&g.laplacian(LaplacianKind::Combinatorial)).unwrap()
    }

    #[test]
    fn noise_free_signals_recover_exactly() {
        let oracle = oracle30();
        let f = 6;
        let sig = gen_signal_with_powers(&oracle, f, 1.0, 0.0, 3).unwrap();
        let s_set = avm_sample_exact(&oracle, f).unwrap().vertices;
        let observed: Vec<f64> = s_set.iter().map(|&v| sig.x[v]).collect();
        let rec = reconstruct(&oracle, &ReconstructionSpec::plain(f), &s_set, &observed).unwrap();
        assert!(!rec.rank_deficient);
        let err: f64 = rec
            .x_hat
            .iter()
            .zip(&sig.x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = sig.x.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(err / norm <= 1e-7, "relative error {}", err / norm);
    }

    #[test]
    fn full_observation_projects_onto_the_band() {
        let oracle = oracle30();
        let f = 5;
        let sig = gen_signal_with_powers(&oracle, 10, 1.0, 0.1, 7).unwrap();
        let all: Vec<usize> = (0..30).collect();
        let rec = reconstruct(&oracle, &ReconstructionSpec::plain(f), &all, &sig.noisy).unwrap();
        let band: Vec<usize> = (0..f).collect();
        let projected = oracle.project(&band, &sig.noisy);
        for v in 0..30 {
            assert!((rec.x_hat[v] - projected[v]).abs() < 1e-10);
        }
    }

    #[test]
    fn duplicated_rows_equal_weighted_rows() {
        let oracle = oracle30();
        let f = 4;
        let sig = gen_signal_with_powers(&oracle, f, 1.0, 0.1, 11).unwrap();
        let dup_set = vec![2usize, 9, 9, 17, 9];
        let dup_obs: Vec<f64> = dup_set.iter().map(|&v| sig.noisy[v]).collect();
        let plain = reconstruct(&oracle, &ReconstructionSpec::plain(f), &dup_set, &dup_obs).unwrap();

        let uniq_set = vec![2usize, 9, 17];
        let uniq_obs: Vec<f64> = uniq_set.iter().map(|&v| sig.noisy[v]).collect();
        let weighted = reconstruct(
            &oracle,
            &ReconstructionSpec::weighted(f, vec![1.0, 3.0, 1.0]),
            &uniq_set,
            &uniq_obs,
        )
        .unwrap();
        for v in 0..30 {
            assert!(
                (plain.x_hat[v] - weighted.x_hat[v]).abs() < 1e-10,
                "vertex {v}: {} vs {}",
                plain.x_hat[v],
                weighted.x_hat[v]
            );
        }
    }

    #[test]
    fn reconstruction_is_idempotent() {
        let oracle = oracle30();
        let f = 6;
        let sig = gen_signal_with_powers(&oracle, f, 1.0, 0.1, 19).unwrap();
        let s_set: Vec<usize> = vec![0, 3, 6, 9, 12, 15, 18, 21];
        let spec = ReconstructionSpec::plain(f);
        let obs: Vec<f64> = s_set.iter().map(|&v| sig.noisy[v]).collect();
        let first = reconstruct(&oracle, &spec, &s_set, &obs).unwrap();
        let obs2: Vec<f64> = s_set.iter().map(|&v| first.x_hat[v]).collect();
        let second = reconstruct(&oracle, &spec, &s_set, &obs2).unwrap();
        for v in 0..30 {
            assert!((first.x_hat[v] - second.x_hat[v]).abs() < 1e-10);
        }
    }

    #[test]
    fn wrs_weight_formula() {
        let w = wrs_weights(&[0.25, 0.25, 0.25, 0.25]).unwrap();
        assert!(w.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let w2 = wrs_weights(&[0.2, 0.4]).unwrap();
        assert!((w2[0] - 2.5).abs() < 1e-12);
        assert!((w2[1] - 1.25).abs() < 1e-12);
        assert!(wrs_weights(&[0.5, 0.0]).is_err());
        assert!(wrs_weights(&[]).is_err());
    }

    #[test]
    fn snr_arithmetic() {
        let f = vec![1.0, 2.0, 2.0];
        assert!((snr_db(&f, &[0.0, 0.0, 0.0]) - 0.0).abs() < 1e-12);
        // ‖f̂−f‖² = 0.1·‖f‖² → 10 dB.
        let scale = (0.1f64 * 9.0 / 9.0).sqrt();
        let fhat: Vec<f64> = f.iter().map(|&x| x + scale * x).collect();
        assert!((snr_db(&f, &fhat) - 10.0).abs() < 1e-9);
        // Scale invariance.
        let f2: Vec<f64> = f.iter().map(|&x| 7.0 * x).collect();
        let fhat2: Vec<f64> = fhat.iter().map(|&x| 7.0 * x).collect();
        assert!((snr_db(&f2, &fhat2) - snr_db(&f, &fhat)).abs() < 1e-12);
        assert_eq!(snr_db(&f, &f.clone()), f64::INFINITY);
    }

    #[test]
    fn classify_full_observation_is_perfect() {
        let oracle = oracle30();
        let labels: Vec<usize> = (0..30).map(|v| if v % 3 == 0 { 0 } else { 1 }).collect();
        let mat = indicator_matrix(&labels, 2).unwrap();
        let all: Vec<usize> = (0..30).collect();
        let got = classify_one_vs_all(&oracle, &ReconstructionSpec::plain(30), &all, &mat).unwrap();
        assert_eq!(got, labels);
    }

    #[test]
    fn classify_ties_take_the_lowest_class() {
        let oracle = oracle30();
        // All-zero labels ⇒ both class reconstructions vanish ⇒ ties.
        let mat = DMatrix::zeros(30, 3);
        let s_set: Vec<usize> = (0..10).collect();
        let got =
            classify_one_vs_all(&oracle, &ReconstructionSpec::plain(5), &s_set, &mat).unwrap();
        assert!(got.iter().all(|&c| c == 0));
    }

    #[test]
    fn rejects_malformed_inputs() {
        let oracle = oracle30();
        let spec = ReconstructionSpec::plain(5);
        assert!(reconstruct(&oracle, &spec, &[], &[]).is_err());
        assert!(reconstruct(&oracle, &spec, &[1, 2], &[0.0]).is_err());
        assert!(reconstruct(&oracle, &spec, &[40], &[0.0]).is_err());
        let mut bad = ReconstructionSpec::plain(0);
        assert!(reconstruct(&oracle, &bad, &[1], &[0.0]).is_err());
        bad = ReconstructionSpec::weighted(5, vec![1.0]);
        assert!(reconstruct(&oracle, &bad, &[1, 2], &[0.0, 0.0]).is_err());
        bad = ReconstructionSpec::weighted(5, vec![1.0, -1.0]);
        assert!(reconstruct(&oracle, &bad, &[1, 2], &[0.0, 0.0]).is_err());
        bad = ReconstructionSpec::plain(5);
        bad.weights = Some(vec![1.0, 1.0]);
        assert!(reconstruct(&oracle, &bad, &[1, 2], &[0.0, 0.0]).is_err());
    }
}
