//! Subset pursuit: selection by extremal eigenvectors of shrinking principal
//! submatrices.
//!
//! The ideal variant works with exact spectral projectors onto a band that
//! grows by one frequency per iteration. The finite-`k` variant never
//! factorizes anything: it finds the minimizer of the Rayleigh quotient of
//! `(L^k)` restricted to the unselected vertices with a restarted Lanczos
//! iteration on the sparse operator, then samples the vertex where that
//! minimizer is largest in magnitude.

use std::time::Instant;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Laplacian;
use crate::spectral::EigenOracle;

use super::{argmax_unselected, params_map, Method, SamplingResult};

/// Maximum Laplacian applications per selection step before the eigensolve
/// returns its best effort.
const LANCZOS_BUDGET: usize = 10_000;
/// Lanczos basis size per restart cycle.
const LANCZOS_BASIS: usize = 64;
/// Relative residual tolerance for Ritz-pair convergence.
const LANCZOS_TOL: f64 = 1e-8;

/// Ideal subset pursuit with the dense oracle: iteration `m` uses the band
/// `{0..m}` (one more frequency than selected vertices) and picks the vertex
/// maximizing `‖d_v‖² − ‖P_{D̃} d_v‖²`, where `D̃` collects the filtered
/// deltas of the already-selected vertices recomputed in the current band.
pub fn sp_ideal_sample(oracle: &EigenOracle, s: usize) -> Result<SamplingResult> {
    let t0 = Instant::now();
    let n = oracle.n();
    if s == 0 || s >= n {
        return Err(Error::InvalidParameter(format!(
            "sample count must be in [1, {}], got {s}",
            n - 1
        )));
    }
    let u = oracle.u();
    let mut selected_mask = vec![false; n];
    let mut vertices: Vec<usize> = Vec::with_capacity(s);
    let mut scores = Vec::with_capacity(s);

    for m in 0..s {
        let band = m + 1;
        // Work in coefficient space: the delta filtered to `band` frequencies
        // is represented by row v of U[:, 0..band]; norms and inner products
        // of the d-vectors coincide with those of these rows.
        let coeff = |v: usize| -> Vec<f64> { (0..band).map(|j| u[(v, j)]).collect() };
        // Orthonormal basis of the span of the selected rows.
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
        for &w in &vertices {
            let mut a = coeff(w);
            let orig_norm_sq: f64 = a.iter().map(|x| x * x).sum();
            for q in &basis {
                let dot: f64 = a.iter().zip(q).map(|(x, y)| x * y).sum();
                for (x, y) in a.iter_mut().zip(q) {
                    *x -= dot * y;
                }
            }
            let res_norm_sq: f64 = a.iter().map(|x| x * x).sum();
            if res_norm_sq > 1e-24 * orig_norm_sq.max(f64::MIN_POSITIVE) {
                let inv = res_norm_sq.sqrt().recip();
                for x in a.iter_mut() {
                    *x *= inv;
                }
                basis.push(a);
            }
        }
        let score_of = |v: usize| -> f64 {
            let a = coeff(v);
            let norm_sq: f64 = a.iter().map(|x| x * x).sum();
            let projected: f64 = basis
                .iter()
                .map(|q| a.iter().zip(q).map(|(x, y)| x * y).sum::<f64>().powi(2))
                .sum();
            norm_sq - projected
        };
        let v = argmax_unselected(n, &selected_mask, score_of)
            .expect("s < n leaves an unselected candidate");
        scores.push(score_of(v));
        selected_mask[v] = true;
        vertices.push(v);
    }

    Ok(SamplingResult {
        method: Method::SpIdeal,
        vertices,
        scores,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        params: params_map([("s", s.to_string())]),
        probabilities: None,
        flags: vec![],
    })
}

/// Smallest Ritz pair of the operator restricted to `free` (global indices,
/// ascending), where one operator application is `k` sparse Laplacian
/// matvecs. Returns the unit eigenvector approximation, whether it converged,
/// and the Laplacian applications consumed.
fn smallest_eigvec_submatrix(
    lap: &Laplacian,
    free: &[usize],
    k: usize,
    budget: usize,
) -> (Vec<f64>, bool, usize) {
    let n = lap.n();
    let dim = free.len();
    if dim == 1 {
        return (vec![1.0], true, 0);
    }
    let mut full = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut spent = 0usize;
    // One application of (L^k) restricted to the free set.
    let mut apply = |x: &[f64], out: &mut [f64], spent: &mut usize| {
        full.fill(0.0);
        for (i, &g) in free.iter().enumerate() {
            full[g] = x[i];
        }
        for _ in 0..k {
            lap.matvec_into(&full, &mut scratch);
            std::mem::swap(&mut full, &mut scratch);
            *spent += 1;
        }
        for (i, &g) in free.iter().enumerate() {
            out[i] = full[g];
        }
    };

    let mut start = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut best: Option<Vec<f64>> = None;
    let mut converged = false;
    let mut anorm: f64 = f64::MIN_POSITIVE;

    'restart: while spent + k <= budget {
        let cap = LANCZOS_BASIS.min(dim);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cap);
        let mut alphas: Vec<f64> = Vec::with_capacity(cap);
        let mut betas: Vec<f64> = Vec::with_capacity(cap);
        let mut v_cur = start.clone();
        let mut exhausted = false;
        while basis.len() < cap && spent + k <= budget {
            let mut w = vec![0.0; dim];
            apply(&v_cur, &mut w, &mut spent);
            let alpha: f64 = w.iter().zip(&v_cur).map(|(a, b)| a * b).sum();
            alphas.push(alpha);
            basis.push(v_cur.clone());
            // Full reorthogonalization keeps the basis clean across the long
            // spectral range of L^k.
            for _ in 0..2 {
                for q in &basis {
                    let dot: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                    for (x, y) in w.iter_mut().zip(q) {
                        *x -= dot * y;
                    }
                }
            }
            let beta: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            anorm = anorm.max(alpha.abs() + beta);
            if beta <= 1e-14 * anorm {
                exhausted = true;
                break;
            }
            betas.push(beta);
            for x in w.iter_mut() {
                *x /= beta;
            }
            v_cur = w;
        }
        if alphas.is_empty() {
            break;
        }
        // Solve the projected tridiagonal problem.
        let t_dim = alphas.len();
        let t_mat = DMatrix::from_fn(t_dim, t_dim, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j || j + 1 == i {
                betas[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = t_mat.symmetric_eigen();
        let mut min_idx = 0;
        for i in 1..t_dim {
            if eig.eigenvalues[i] < eig.eigenvalues[min_idx] {
                min_idx = i;
            }
        }
        anorm = anorm.max(eig.eigenvalues.amax());
        let mut y: Vec<f64> = (0..t_dim).map(|i| eig.eigenvectors[(i, min_idx)]).collect();
        // Snap coordinates at rounding level so exactly-degenerate cases
        // (e.g. the constant minimizer on the untouched graph) stay exact.
        let y_max = y.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        for x in y.iter_mut() {
            if x.abs() < 1e-12 * y_max {
                *x = 0.0;
            }
        }
        let y_norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut ritz = vec![0.0; dim];
        for (j, q) in basis.iter().enumerate() {
            let c = y[j] / y_norm;
            if c != 0.0 {
                for (r, &qv) in ritz.iter_mut().zip(q) {
                    *r += c * qv;
                }
            }
        }
        let residual = if exhausted || t_dim == dim {
            0.0
        } else {
            betas.get(t_dim - 1).copied().unwrap_or(0.0) * (y[t_dim - 1] / y_norm).abs()
        };
        best = Some(ritz.clone());
        if residual <= LANCZOS_TOL * anorm {
            converged = true;
            break 'restart;
        }
        start = ritz;
    }

    let psi = best.unwrap_or(start);
    (psi, converged, spent)
}

/// Finite-`k` subset pursuit from the sparse Laplacian alone.
///
/// Each iteration approximates the minimizer `ψ` of `ψᵀL^kψ/ψᵀψ` subject to
/// `ψ = 0` on the selected set — the smallest eigenvector of the principal
/// submatrix `(L^k)_{S^c,S^c}` — starting from the all-ones vector, with at
/// most 10⁴ Laplacian applications per step (best effort flagged beyond
/// that). The vertex with the largest `|ψ|` is selected.
pub fn sp_finite_k_sample(lap: &Laplacian, s: usize, k: usize) -> Result<SamplingResult> {
    let t0 = Instant::now();
    let n = lap.n();
    if k == 0 {
        return Err(Error::InvalidParameter("power k must be at least 1".into()));
    }
    if s == 0 || s >= n {
        return Err(Error::InvalidParameter(format!(
            "sample count must be in [1, {}], got {s}",
            n - 1
        )));
    }
    let mut selected_mask = vec![false; n];
    let mut vertices: Vec<usize> = Vec::with_capacity(s);
    let mut scores = Vec::with_capacity(s);
    let mut flags = Vec::new();

    for m in 0..s {
        let free: Vec<usize> = (0..n).filter(|&v| !selected_mask[v]).collect();
        let (psi, converged, _) = smallest_eigvec_submatrix(lap, &free, k, LANCZOS_BUDGET);
        if !converged {
            flags.push(format!("eig_cap_hit@iter={m}"));
        }
        let mut best_local = 0usize;
        for i in 1..free.len() {
            if psi[i].abs() > psi[best_local].abs() {
                best_local = i;
            }
        }
        let v = free[best_local];
        scores.push(psi[best_local].abs());
        selected_mask[v] = true;
        vertices.push(v);
    }

    Ok(SamplingResult {
        method: Method::SpFiniteK,
        vertices,
        scores,
        elapsed_seconds: t0.elapsed().as_secs_f64(),
        params: params_map([
            ("s", s.to_string()),
            ("k", k.to_string()),
            ("eig_budget", LANCZOS_BUDGET.to_string()),
        ]),
        probabilities: None,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_sensor_knn, path_graph, GraphBuilder, LaplacianKind};

    #[test]
    fn ideal_first_pick_breaks_the_constant_tie_at_vertex_zero() {
        let g = gen_sensor_knn(12, 3, 5).unwrap();
        assert!(g.connected());
        let lap = g.laplacian(LaplacianKind::Combinatorial);
        let oracle = EigenOracle::new(&lap).unwrap();
        let r = sp_ideal_sample(&oracle, 3).unwrap();
        assert_eq!(r.vertices[0], 0, "constant first eigenvector ties at 0");
        assert!((r.scores[0] - 1.0 / 12.0).abs() < 1e-10);
    }

    #[test]
    fn ideal_runs_to_near_full_sample_without_rank_failure() {
        let g = gen_sensor_knn(10, 3, 2).unwrap();
        let lap = g.laplacian(LaplacianKind::Combinatorial);
        let oracle = EigenOracle::new(&lap).unwrap();
        let r = sp_ideal_sample(&oracle, 9).unwrap();
        let mut uniq = r.vertices.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), 9);
        assert!(r.scores.iter().all(|&sc| sc.is_finite() && sc > -1e-12));
    }

    #[test]
    fn finite_k_first_pick_is_vertex_zero_on_connected_graphs() {
        // The Rayleigh minimizer with nothing excluded is the constant
        // vector, so |ψ| ties everywhere and the lowest index wins.
        let g = gen_sensor_knn(15, 3, 8).unwrap();
        assert!(g.connected());
        let lap = g.laplacian(LaplacianKind::Combinatorial);
        let r = sp_finite_k_sample(&lap, 2, 4).unwrap();
        assert_eq!(r.vertices[0], 0);
    }

    #[test]
    fn finite_k_is_deterministic() {
        let g = gen_sensor_knn(20, 4, 3).unwrap();
        let lap = g.laplacian(LaplacianKind::Combinatorial);
        let a = sp_finite_k_sample(&lap, 5, 4).unwrap();
        let b = sp_finite_k_sample(&lap, 5, 4).unwrap();
        assert_eq!(a.vertices, b.vertices);
        let mut uniq = a.vertices.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), 5);
    }

    #[test]
    fn submatrix_eigensolve_matches_dense_on_small_case() {
        let g = gen_sensor_knn(12, 3, 4).unwrap();
        let lap = g.laplacian(LaplacianKind::Combinatorial);
        let free: Vec<usize> = (0..12).filter(|&v| v != 3 && v != 7).collect();
        let (psi, converged, _) = smallest_eigvec_submatrix(&lap, &free, 2, 10_000);
        assert!(converged);
        // Compare the Rayleigh quotient against the dense smallest eigenvalue
        // of (L²)_{free,free}.
        let dense = lap.to_dense();
        let l2 = &dense * &dense;
        let sub = DMatrix::from_fn(free.len(), free.len(), |i, j| l2[(free[i], free[j])]);
        let dense_min = sub.clone().symmetric_eigen().eigenvalues.min();
        let psi_v = DMatrix::from_column_slice(free.len(), 1, &psi);
        let quotient = (psi_v.transpose() * &sub * &psi_v)[(0, 0)];
        assert!(
            (quotient - dense_min).abs() <= 1e-8 * sub.norm() + 1e-12,
            "quotient {quotient} vs dense min {dense_min}"
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        let lap = path_graph(5).laplacian(LaplacianKind::Combinatorial);
        assert!(sp_finite_k_sample(&lap, 2, 0).is_err());
        assert!(sp_finite_k_sample(&lap, 0, 4).is_err());
        assert!(sp_finite_k_sample(&lap, 5, 4).is_err());
        let oracle = EigenOracle::new(&lap).unwrap();
        assert!(sp_ideal_sample(&oracle, 0).is_err());
        assert!(sp_ideal_sample(&oracle, 5).is_err());
    }

    #[test]
    fn disconnected_components_are_covered_early() {
        // Two 4-cycles: after sampling in one component, the minimizer lives
        // in the untouched component, so the second pick lands there.
        let mut b = GraphBuilder::new(8);
        for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)] {
            b.add_edge(i, j, 1.0).unwrap();
        }
        let lap = b.build().laplacian(LaplacianKind::Combinatorial);
        let r = sp_finite_k_sample(&lap, 2, 4).unwrap();
        let first_component = r.vertices[0] < 4;
        let second_component = r.vertices[1] < 4;
        assert_ne!(first_component, second_component);
    }
}
