//! Shared helpers for the integration tests: brute-force oracles and small
//! dense linear-algebra utilities kept independent of the library internals.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use gsamp_core::spectral::{exact_filtered_delta, EigenOracle};
use gsamp_core::SparseGraph;

/// All-pairs shortest paths with edge length `1/weight`, the same convention
/// the library's Dijkstra uses, via Floyd–Warshall.
pub fn floyd_warshall(g: &SparseGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for v in 0..n {
        dist[v][v] = 0.0;
        for (u, w) in g.neighbors(v) {
            dist[v][u] = dist[v][u].min(1.0 / w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    pearson(&ra, &rb)
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

/// Asserts the structural contract of a [`SparseGraph`]: consistent CSR,
/// indices in range, no self-loops, strictly positive finite weights, and
/// symmetric adjacency with equal weights both ways.
pub fn check_graph_invariants(g: &SparseGraph) {
    let n = g.n();
    let row_ptr = g.row_ptr();
    assert_eq!(row_ptr.len(), n + 1);
    assert_eq!(row_ptr[0], 0);
    assert_eq!(*row_ptr.last().unwrap(), g.col_idx().len());
    assert_eq!(g.col_idx().len(), g.weights().len());
    for v in 0..n {
        assert!(row_ptr[v] <= row_ptr[v + 1], "row_ptr not monotone at {v}");
        for (u, w) in g.neighbors(v) {
            assert!(u < n, "neighbor index {u} out of range");
            assert_ne!(u, v, "self-loop at {v}");
            assert!(w.is_finite() && w > 0.0, "bad weight {w} on ({v},{u})");
            let back = g.weight(u, v);
            assert_eq!(back, Some(w), "asymmetric edge ({v},{u})");
        }
    }
    assert_eq!(
        g.edge_count() * 2,
        g.col_idx().len(),
        "edge count disagrees with CSR entries"
    );
}

/// Exact filtered deltas for the vertices of `s_set` with band `r_set`,
/// as columns of an `n × |S|` matrix.
pub fn delta_matrix(oracle: &EigenOracle, r_set: &[usize], s_set: &[usize]) -> DMatrix<f64> {
    let n = oracle.n();
    let cols: Vec<Vec<f64>> = s_set
        .iter()
        .map(|&v| exact_filtered_delta(oracle, r_set, v))
        .collect();
    DMatrix::from_fn(n, s_set.len(), |i, j| cols[j][i])
}

/// Squared parallelepiped volume of the filtered deltas of `s_set`:
/// `det(DᵀD)`.
pub fn vol_squared(oracle: &EigenOracle, r_set: &[usize], s_set: &[usize]) -> f64 {
    let d = delta_matrix(oracle, r_set, s_set);
    d.tr_mul(&d).determinant()
}

/// `det(U_{S,F}ᵀ U_{S,F})` for the first `f` frequencies.
pub fn det_gram_usf(oracle: &EigenOracle, s_set: &[usize], f: usize) -> f64 {
    let freqs: Vec<usize> = (0..f).collect();
    let u_sf = oracle.u_submatrix(s_set, &freqs);
    u_sf.tr_mul(&u_sf).determinant()
}

/// A uniformly random size-`s` subset of `0..n`, in draw order.
pub fn random_distinct_subset(rng: &mut ChaCha12Rng, n: usize, s: usize) -> Vec<usize> {
    assert!(s <= n);
    let mut picked = vec![false; n];
    let mut out = Vec::with_capacity(s);
    while out.len() < s {
        let v = rng.random_range(0..n);
        if !picked[v] {
            picked[v] = true;
            out.push(v);
        }
    }
    out
}

pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
