//! Synthetic graph models used by the benchmark experiments.
//!
//! All generators are deterministic in their seed, produce symmetric
//! self-loop-free graphs, and use unit weights except for the knn models,
//! which use a Gaussian kernel on Euclidean distance.

use super::{GraphBuilder, SparseGraph};
use crate::error::{Error, Result};
use crate::rng;
use rand::Rng;
use std::collections::BTreeSet;

/// Random sensor graph: `n` points uniform in the unit square, connected to
/// their `k` nearest neighbors (union symmetrization). Edge weights are
/// exp(−d²/2σ²) with σ the mean distance to the k-th neighbor.
pub fn gen_sensor_knn(n: usize, k: usize, seed: u64) -> Result<SparseGraph> {
    let mut r = rng::rng_from(rng::mix(seed, rng::tag::GRAPH));
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![r.random::<f64>(), r.random::<f64>()])
        .collect();
    build_knn_graph_from_points(&points, k)
}

/// knn graph over an arbitrary point cloud (any dimension). Duplicate points
/// sit at distance 0 and get weight 1; coordinates must be finite.
pub fn build_knn_graph_from_points(points: &[Vec<f64>], k: usize) -> Result<SparseGraph> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty point cloud".into()));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "knn requires 0 < k < n (got k={k}, n={n})"
        )));
    }
    let dim = points[0].len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::InvalidInput(format!(
                "point {i} has {} coordinates, expected {dim}",
                p.len()
            )));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
    }

    let dist_sq = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
    };

    // Brute-force k nearest per vertex; ties broken by vertex index so the
    // result is deterministic.
    let neighbors: Vec<Vec<(f64, usize)>> = crate::par::map_indexed(n, |i| {
        let mut cand: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (dist_sq(&points[i], &points[j]), j))
            .collect();
        cand.select_nth_unstable_by(k - 1, |a, b| {
            a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1))
        });
        cand.truncate(k);
        cand.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        cand
    });

    // σ = mean distance to the k-th neighbor.
    let sigma = neighbors
        .iter()
        .map(|nb| nb[k - 1].0.sqrt())
        .sum::<f64>()
        / n as f64;

    let mut b = GraphBuilder::new(n);
    for (i, nb) in neighbors.iter().enumerate() {
        for &(d2, j) in nb {
            let w = if sigma > 0.0 {
                // Clamp away underflow: weights must stay strictly positive.
                (-d2 / (2.0 * sigma * sigma)).exp().max(f64::MIN_POSITIVE)
            } else {
                1.0
            };
            b.add_edge(i, j, w)?;
        }
    }
    Ok(b.build())
}

/// G(n, p) with unit weights.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<SparseGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut r = rng::rng_from(rng::mix(seed, rng::tag::GRAPH));
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if r.random_bool(p) {
                b.add_edge(i, j, 1.0)?;
            }
        }
    }
    Ok(b.build())
}

/// Barabási–Albert preferential attachment: each new vertex attaches to
/// `m_attach` distinct existing vertices with probability proportional to
/// degree. The first attachment targets are vertices 0..m_attach.
pub fn gen_barabasi_albert(n: usize, m_attach: usize, seed: u64) -> Result<SparseGraph> {
    if m_attach == 0 || m_attach >= n {
        return Err(Error::InvalidParameter(format!(
            "preferential attachment requires 0 < m < n (got m={m_attach}, n={n})"
        )));
    }
    let mut r = rng::rng_from(rng::mix(seed, rng::tag::GRAPH));
    let mut b = GraphBuilder::new(n);
    // One endpoint entry per incident edge; sampling an index uniformly from
    // this list is sampling a vertex proportionally to its degree.
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * m_attach * n);
    let mut targets: Vec<usize> = (0..m_attach).collect();
    for v in m_attach..n {
        for &t in &targets {
            b.add_edge(v, t, 1.0)?;
            repeated.push(t);
            repeated.push(v);
        }
        if v + 1 == n {
            break;
        }
        let mut next = BTreeSet::new();
        while next.len() < m_attach {
            let pick = repeated[r.random_range(0..repeated.len())];
            next.insert(pick);
        }
        targets = next.into_iter().collect();
    }
    Ok(b.build())
}

/// Planted-partition graph: `n_communities` near-equal blocks (remainder goes
/// to the last block), intra-block edge probability 0.2, inter-block 0.002.
pub fn gen_community(n: usize, n_communities: usize, seed: u64) -> Result<SparseGraph> {
    const P_INTRA: f64 = 0.2;
    const P_INTER: f64 = 0.002;
    if n_communities == 0 || n_communities > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ communities ≤ n (got {n_communities}, n={n})"
        )));
    }
    let base = n / n_communities;
    let block = |v: usize| (v / base).min(n_communities - 1);
    let mut r = rng::rng_from(rng::mix(seed, rng::tag::GRAPH));
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block(i) == block(j) { P_INTRA } else { P_INTER };
            if r.random_bool(p) {
                b.add_edge(i, j, 1.0)?;
            }
        }
    }
    Ok(b.build())
}

/// Watts–Strogatz small world: ring lattice with `k` neighbors per vertex
/// (`k` even), each clockwise edge rewired with probability `p_rewire`.
pub fn gen_watts_strogatz(n: usize, k: usize, p_rewire: f64, seed: u64) -> Result<SparseGraph> {
    if k == 0 || k % 2 != 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "ring degree must be even and 0 < k < n (got k={k}, n={n})"
        )));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(Error::InvalidParameter(format!(
            "rewiring probability {p_rewire} outside [0, 1]"
        )));
    }
    let mut r = rng::rng_from(rng::mix(seed, rng::tag::GRAPH));
    let norm = |a: usize, c: usize| (a.min(c), a.max(c));
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..n {
        for j in 1..=(k / 2) {
            edges.insert(norm(i, (i + j) % n));
        }
    }
    for i in 0..n {
        for j in 1..=(k / 2) {
            let e = norm(i, (i + j) % n);
            if !edges.contains(&e) || !r.random_bool(p_rewire) {
                continue;
            }
            // Try a handful of replacement endpoints; on a dense vertex there
            // may be none, in which case the original edge stays.
            for _ in 0..n {
                let u = r.random_range(0..n);
                if u != i && !edges.contains(&norm(i, u)) {
                    edges.remove(&e);
                    edges.insert(norm(i, u));
                    break;
                }
            }
        }
    }
    let mut b = GraphBuilder::new(n);
    for (i, j) in edges {
        b.add_edge(i, j, 1.0)?;
    }
    Ok(b.build())
}

/// `rows × cols` 4-neighbor lattice, unit weights.
pub fn gen_grid_2d(rows: usize, cols: usize) -> Result<SparseGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("grid with zero extent".into()));
    }
    let v = |r: usize, c: usize| r * cols + c;
    let mut b = GraphBuilder::new(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                b.add_edge(v(r, c), v(r, c + 1), 1.0)?;
            }
            if r + 1 < rows {
                b.add_edge(v(r, c), v(r + 1, c), 1.0)?;
            }
        }
    }
    Ok(b.build())
}

/// Path on `n` vertices, unit weights.
pub fn gen_path(n: usize) -> Result<SparseGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("empty path".into()));
    }
    let mut b = GraphBuilder::new(n);
    for i in 0..n.saturating_sub(1) {
        b.add_edge(i, i + 1, 1.0)?;
    }
    Ok(b.build())
}
