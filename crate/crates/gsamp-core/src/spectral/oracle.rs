//! Dense eigendecomposition oracle for desk-scale validation.
//!
//! The sampling algorithms themselves never need this; it exists so tests and
//! baselines can compare estimation paths against exact spectral projectors,
//! and so reconstruction can form `U_F` at sizes where a dense factorization
//! is cheap.

use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Laplacian;

/// Full eigendecomposition `L = U Σ Uᵀ` with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct EigenOracle {
    u: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl EigenOracle {
    /// Factorizes the Laplacian densely. Intended for `n` up to a few
    /// thousand; cost is `O(n³)`.
    pub fn new(lap: &Laplacian) -> Result<Self> {
        let n = lap.n();
        if n == 0 {
            return Err(Error::InvalidInput("empty Laplacian".into()));
        }
        let dense = lap.to_dense();
        let m = Mat::from_fn(n, n, |i, j| dense[(i, j)]);
        let evd = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::InvalidInput(format!("eigendecomposition failed: {e:?}")))?;
        let s = evd.S();
        let u_raw = evd.U();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[a].partial_cmp(&s[b]).expect("non-finite eigenvalue"));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| s[i]).collect();
        let u = DMatrix::from_fn(n, n, |i, j| u_raw[(i, order[j])]);
        Ok(Self { u, eigenvalues })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvector matrix; column `j` pairs with `eigenvalues()[j]`.
    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// `U_{S,F}`: the submatrix with rows `vertices` and columns `freqs`.
    pub fn u_submatrix(&self, vertices: &[usize], freqs: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(vertices.len(), freqs.len(), |i, j| {
            self.u[(vertices[i], freqs[j])]
        })
    }

    /// Exact squared local coherence `‖U_Fᵀ δ_v‖²` for the first `f`
    /// frequencies, i.e. the diagonal of the band-limiting projector.
    pub fn sq_coherence_prefix(&self, f: usize) -> Vec<f64> {
        assert!(f <= self.n(), "band width exceeds graph size");
        (0..self.n())
            .map(|v| (0..f).map(|j| self.u[(v, j)].powi(2)).sum())
            .collect()
    }

    /// Projects `x` onto the span of the eigenvectors indexed by `r_set`
    /// (0-based positions in ascending-eigenvalue order).
    pub fn project(&self, r_set: &[usize], x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n);
        let mut out = vec![0.0; n];
        for &j in r_set {
            assert!(j < n, "frequency index {j} out of range");
            let mut coeff = 0.0;
            for i in 0..n {
                coeff += self.u[(i, j)] * x[i];
            }
            for i in 0..n {
                out[i] += coeff * self.u[(i, j)];
            }
        }
        out
    }
}

/// Exact filtered delta `d_v = U_R U_Rᵀ δ_v` via the dense oracle.
///
/// `r_set` holds 0-based frequency indices (ascending-eigenvalue order).
pub fn exact_filtered_delta(oracle: &EigenOracle, r_set: &[usize], v: usize) -> Vec<f64> {
    let n = oracle.n();
    assert!(v < n, "vertex {v} out of range");
    let u = oracle.u();
    let mut out = vec![0.0; n];
    for &j in r_set {
        assert!(j < n, "frequency index {j} out of range");
        let coeff = u[(v, j)];
        for i in 0..n {
            out[i] += coeff * u[(i, j)];
        }
    }
    out
}
