//! Weighted undirected graphs in CSR form and their Laplacians.
//!
//! [`SparseGraph`] is the ground type everything else builds on: symmetric,
//! self-loop-free, strictly positive finite weights, neighbor lists sorted by
//! vertex index. Construction goes through [`GraphBuilder`], which validates
//! those invariants once so the rest of the crate can rely on them.

mod generators;
mod geodesic;
mod io;
mod signal;

pub use generators::{
    build_knn_graph_from_points, gen_barabasi_albert, gen_community, gen_erdos_renyi, gen_grid_2d,
    gen_path, gen_sensor_knn, gen_watts_strogatz,
};
pub use geodesic::{geodesic_from_set, GeodesicDistanceField};
pub use io::{read_edge_list, read_points_csv, write_edge_list, LabelColumn};
pub use signal::{gen_signal, gen_signal_with_powers, SyntheticSignal};

use crate::error::{Error, Result};
use crate::par;
use crate::rng;
use rand_distr::{Distribution, StandardNormal};

/// Weighted undirected graph, CSR adjacency with both directions stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
}

/// Accumulates undirected edges, validates them, and emits a [`SparseGraph`].
/// Re-adding an edge overwrites its weight (last write wins).
#[derive(Debug, Default)]
pub struct GraphBuilder {
    n: usize,
    edges: std::collections::BTreeMap<(usize, usize), f64>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            n,
            edges: std::collections::BTreeMap::new(),
        }
    }

    /// Queues the undirected edge {i, j} with weight `w`. Validation happens
    /// here so the error names the offending edge.
    pub fn add_edge(&mut self, i: usize, j: usize, w: f64) -> Result<&mut Self> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidInput(format!(
                "edge ({i}, {j}) out of range for {} vertices",
                self.n
            )));
        }
        if i == j {
            return Err(Error::InvalidInput(format!("self-loop at vertex {i}")));
        }
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidInput(format!(
                "edge ({i}, {j}) has non-positive or non-finite weight {w}"
            )));
        }
        self.edges.insert((i.min(j), i.max(j)), w);
        Ok(self)
    }

    pub fn build(self) -> SparseGraph {
        let n = self.n;
        let mut deg = vec![0usize; n];
        for &(i, j) in self.edges.keys() {
            deg[i] += 1;
            deg[j] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for v in 0..n {
            row_ptr[v + 1] = row_ptr[v] + deg[v];
        }
        let nnz = row_ptr[n];
        let mut col_idx = vec![0usize; nnz];
        let mut weights = vec![0.0f64; nnz];
        let mut cursor = row_ptr.clone();
        // BTreeMap iterates (i, j) in lexicographic order, so each row's
        // neighbor list comes out sorted by construction.
        for (&(i, j), &w) in &self.edges {
            col_idx[cursor[i]] = j;
            weights[cursor[i]] = w;
            cursor[i] += 1;
        }
        for (&(i, j), &w) in &self.edges {
            col_idx[cursor[j]] = i;
            weights[cursor[j]] = w;
            cursor[j] += 1;
        }
        // The second pass appends lower-indexed endpoints after the first
        // pass's higher-indexed ones; restore per-row sorted order.
        let mut g = SparseGraph {
            n,
            row_ptr,
            col_idx,
            weights,
        };
        g.sort_rows();
        g
    }
}

impl SparseGraph {
    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.col_idx.len() / 2
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sorted `(neighbor, weight)` pairs of `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[v];
        let hi = self.row_ptr[v + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.neighbors(v).map(|(_, w)| w).sum()
    }

    /// Number of incident edges.
    pub fn degree(&self, v: usize) -> usize {
        self.row_ptr[v + 1] - self.row_ptr[v]
    }

    /// Weight of the edge {i, j}, if present.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .binary_search(&j)
            .ok()
            .map(|k| self.weights[lo + k])
    }

    /// Each undirected edge once, as `(i, j, w)` with `i < j`, ordered.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| i < j)
                .map(move |(j, w)| (i, j, w))
        })
    }

    /// True when every vertex is reachable from vertex 0 (or the graph is
    /// empty).
    pub fn connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for (u, _) in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    fn sort_rows(&mut self) {
        for v in 0..self.n {
            let lo = self.row_ptr[v];
            let hi = self.row_ptr[v + 1];
            let mut pairs: Vec<(usize, f64)> = self.col_idx[lo..hi]
                .iter()
                .copied()
                .zip(self.weights[lo..hi].iter().copied())
                .collect();
            pairs.sort_by_key(|&(j, _)| j);
            for (k, (j, w)) in pairs.into_iter().enumerate() {
                self.col_idx[lo + k] = j;
                self.weights[lo + k] = w;
            }
        }
    }

    /// Builds the graph Laplacian of the requested kind.
    pub fn laplacian(&self, kind: LaplacianKind) -> Laplacian {
        Laplacian::from_graph(self, kind)
    }
}

/// Which Laplacian normalization to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    /// L = D − A.
    Combinatorial,
    /// L = I − D^{-1/2} A D^{-1/2}; rows of isolated vertices are zero.
    Normalized,
}

/// Row-block products against a CSR matrix: the two fused kernels the blocked
/// Chebyshev recurrence is built from. Implemented by [`Laplacian`] (original
/// vertex order) and [`PermutedCsr`] (locality order).
pub(crate) trait RowBlockProducts {
    /// Writes row `i` of `M·X` for a row-major `n × width` block `x` into
    /// `out_row`, accumulating in CSR entry order.
    fn row_block_product(&self, x: &[f64], width: usize, i: usize, out_row: &mut [f64]);

    /// Adds `factor` · (row `i` of `M·X`) into `out_row` without zeroing it
    /// first. Same entry-order accumulation; the scale folds into each matrix
    /// entry so the fused filter recurrence can combine the matvec with a
    /// running expression in one pass.
    fn row_block_product_scaled_accum(
        &self,
        x: &[f64],
        width: usize,
        i: usize,
        factor: f64,
        out_row: &mut [f64],
    );
}

/// A copy of the Laplacian's CSR arrays relabeled into a BFS order.
///
/// Vertex ids of point-cloud graphs carry no locality, so a wide probe block
/// gathers neighbor rows from all over the buffer; after a breadth-first
/// relabeling the neighbors of any row cluster into a small id window and the
/// gathers stay cache-resident. Only the blocked filter path uses this copy —
/// it folds the permutation into its entry/exit transposes, so the reordering
/// is invisible to callers.
#[derive(Debug, Clone)]
pub(crate) struct PermutedCsr {
    /// `perm[new] = old` vertex id.
    perm: Vec<u32>,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl PermutedCsr {
    /// The BFS order: entry `new` holds the original id placed at `new`.
    pub(crate) fn perm(&self) -> &[u32] {
        &self.perm
    }
}

impl RowBlockProducts for PermutedCsr {
    fn row_block_product(&self, x: &[f64], width: usize, i: usize, out_row: &mut [f64]) {
        out_row.fill(0.0);
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            let v = self.values[k];
            let base = self.col_idx[k] as usize * width;
            let src = &x[base..base + width];
            for (slot, &s) in out_row.iter_mut().zip(src) {
                *slot += v * s;
            }
        }
    }

    fn row_block_product_scaled_accum(
        &self,
        x: &[f64],
        width: usize,
        i: usize,
        factor: f64,
        out_row: &mut [f64],
    ) {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            let v = factor * self.values[k];
            let base = self.col_idx[k] as usize * width;
            let src = &x[base..base + width];
            for (slot, &s) in out_row.iter_mut().zip(src) {
                *slot += v * s;
            }
        }
    }
}

/// Breadth-first vertex order seeded per component at the lowest-degree
/// vertex (ties by id), visiting neighbors in CSR order. Deterministic for a
/// given CSR structure.
fn bfs_locality_order(n: usize, row_ptr: &[usize], col_idx: &[usize]) -> Vec<u32> {
    let mut seeds: Vec<u32> = (0..n as u32).collect();
    // Row length is degree + 1 (the diagonal), so it orders by degree.
    seeds.sort_unstable_by_key(|&v| (row_ptr[v as usize + 1] - row_ptr[v as usize], v));
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for &s in &seeds {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for k in row_ptr[v as usize]..row_ptr[v as usize + 1] {
                let u = col_idx[k];
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u as u32);
                }
            }
        }
    }
    order
}

fn build_locality_csr(
    n: usize,
    row_ptr: &[usize],
    col_idx: &[usize],
    values: &[f64],
) -> Option<PermutedCsr> {
    if n > u32::MAX as usize {
        return None;
    }
    let perm = bfs_locality_order(n, row_ptr, col_idx);
    let mut new_id = vec![0u32; n];
    for (new, &old) in perm.iter().enumerate() {
        new_id[old as usize] = new as u32;
    }
    let nnz = row_ptr[n];
    let mut p_row_ptr = Vec::with_capacity(n + 1);
    p_row_ptr.push(0usize);
    let mut p_col = Vec::with_capacity(nnz);
    let mut p_val = Vec::with_capacity(nnz);
    let mut row: Vec<(u32, f64)> = Vec::new();
    for &old in &perm {
        let old = old as usize;
        row.clear();
        for k in row_ptr[old]..row_ptr[old + 1] {
            row.push((new_id[col_idx[k]], values[k]));
        }
        // Ascending relabeled ids keep the gathers moving forward in memory.
        row.sort_unstable_by_key(|e| e.0);
        for &(c, v) in &row {
            p_col.push(c);
            p_val.push(v);
        }
        p_row_ptr.push(p_col.len());
    }
    Some(PermutedCsr {
        perm,
        row_ptr: p_row_ptr,
        col_idx: p_col,
        values: p_val,
    })
}

/// Sparse symmetric Laplacian in CSR form, with a cached upper bound on its
/// largest eigenvalue (needed to scale Chebyshev filters).
#[derive(Debug, Clone)]
pub struct Laplacian {
    kind: LaplacianKind,
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    /// Narrow copy of `col_idx` for the matvec hot loops — polynomial
    /// filtering streams the CSR arrays over and over, so index bytes are
    /// a quarter of the traffic. `None` when a column exceeds `u32`.
    col_idx32: Option<Vec<u32>>,
    values: Vec<f64>,
    lambda_max_bound: f64,
    /// BFS-relabeled copy for the blocked filter path; `None` only when ids
    /// exceed `u32`.
    locality: Option<PermutedCsr>,
}

impl RowBlockProducts for Laplacian {
    fn row_block_product(&self, x: &[f64], width: usize, i: usize, out_row: &mut [f64]) {
        out_row.fill(0.0);
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match &self.col_idx32 {
            Some(col_idx) => {
                for k in lo..hi {
                    let v = self.values[k];
                    let base = col_idx[k] as usize * width;
                    let src = &x[base..base + width];
                    for (slot, &s) in out_row.iter_mut().zip(src) {
                        *slot += v * s;
                    }
                }
            }
            None => {
                for k in lo..hi {
                    let v = self.values[k];
                    let base = self.col_idx[k] * width;
                    let src = &x[base..base + width];
                    for (slot, &s) in out_row.iter_mut().zip(src) {
                        *slot += v * s;
                    }
                }
            }
        }
    }

    fn row_block_product_scaled_accum(
        &self,
        x: &[f64],
        width: usize,
        i: usize,
        factor: f64,
        out_row: &mut [f64],
    ) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match &self.col_idx32 {
            Some(col_idx) => {
                for k in lo..hi {
                    let v = factor * self.values[k];
                    let base = col_idx[k] as usize * width;
                    let src = &x[base..base + width];
                    for (slot, &s) in out_row.iter_mut().zip(src) {
                        *slot += v * s;
                    }
                }
            }
            None => {
                for k in lo..hi {
                    let v = factor * self.values[k];
                    let base = self.col_idx[k] * width;
                    let src = &x[base..base + width];
                    for (slot, &s) in out_row.iter_mut().zip(src) {
                        *slot += v * s;
                    }
                }
            }
        }
    }
}

impl Laplacian {
    fn from_graph(g: &SparseGraph, kind: LaplacianKind) -> Laplacian {
        let n = g.n();
        let wdeg: Vec<f64> = (0..n).map(|v| g.weighted_degree(v)).collect();
        let mut row_ptr = vec![0usize; n + 1];
        for v in 0..n {
            // One slot per neighbor plus the diagonal (present even when the
            // vertex is isolated, to keep row structure uniform).
            row_ptr[v + 1] = row_ptr[v] + g.degree(v) + 1;
        }
        let nnz = row_ptr[n];
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![0.0f64; nnz];
        for v in 0..n {
            let mut k = row_ptr[v];
            let mut diagonal_written = false;
            let diag = match kind {
                LaplacianKind::Combinatorial => wdeg[v],
                LaplacianKind::Normalized => {
                    if wdeg[v] > 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            for (u, w) in g.neighbors(v) {
                if !diagonal_written && u > v {
                    col_idx[k] = v;
                    values[k] = diag;
                    diagonal_written = true;
                    k += 1;
                }
                col_idx[k] = u;
                values[k] = match kind {
                    LaplacianKind::Combinatorial => -w,
                    LaplacianKind::Normalized => -w / (wdeg[v] * wdeg[u]).sqrt(),
                };
                k += 1;
            }
            if !diagonal_written {
                col_idx[k] = v;
                values[k] = diag;
            }
        }
        let col_idx32 = if n <= u32::MAX as usize {
            Some(col_idx.iter().map(|&c| c as u32).collect())
        } else {
            None
        };
        let locality = build_locality_csr(n, &row_ptr, &col_idx, &values);
        let mut lap = Laplacian {
            kind,
            n,
            row_ptr,
            col_idx,
            col_idx32,
            values,
            lambda_max_bound: 0.0,
            locality,
        };
        lap.lambda_max_bound = lap.compute_lambda_max_bound(&wdeg);
        lap
    }

    /// Upper bound on the largest eigenvalue: 50 power iterations with a 1%
    /// safety factor, capped by the structural bound (2·max weighted degree
    /// for the combinatorial kind, 2 for the normalized kind).
    fn compute_lambda_max_bound(&self, wdeg: &[f64]) -> f64 {
        let structural = match self.kind {
            LaplacianKind::Combinatorial => 2.0 * wdeg.iter().cloned().fold(0.0, f64::max),
            LaplacianKind::Normalized => 2.0,
        };
        if self.n == 0 || structural == 0.0 {
            return 0.0;
        }
        let mut rng = rng::rng_from(rng::mix(0x4C4D_4258, self.n as u64));
        let mut x: Vec<f64> = (0..self.n)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let mut y = vec![0.0; self.n];
        let mut rayleigh = 0.0;
        for _ in 0..50 {
            self.matvec_into(&x, &mut y);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            rayleigh = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / norm;
            }
        }
        (rayleigh.max(0.0) * 1.01).min(structural)
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cached eigenvalue upper bound.
    pub fn lambda_max_bound(&self) -> f64 {
        self.lambda_max_bound
    }

    /// CSR row `i` as `(columns, values)`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// One CSR row dot product with a fixed four-lane reduction tree: lane
    /// `m` takes entries `m, m+4, m+8, …` and the lanes combine as
    /// `(l0 + l1) + (l2 + l3)`. Four independent chains keep repeated
    /// filtering from serializing on a single FP add chain; the tree is
    /// fixed, so results stay deterministic (they differ in rounding from a
    /// strict left-to-right sum, and from the blocked path's per-entry
    /// order).
    #[inline]
    fn row_dot<C: Copy>(values: &[f64], cols: &[C], x: &[f64], idx: impl Fn(C) -> usize) -> f64 {
        let len = cols.len();
        let (mut l0, mut l1, mut l2, mut l3) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let mut k = 0;
        while k + 4 <= len {
            l0 += values[k] * x[idx(cols[k])];
            l1 += values[k + 1] * x[idx(cols[k + 1])];
            l2 += values[k + 2] * x[idx(cols[k + 2])];
            l3 += values[k + 3] * x[idx(cols[k + 3])];
            k += 4;
        }
        if k < len {
            l0 += values[k] * x[idx(cols[k])];
        }
        if k + 1 < len {
            l1 += values[k + 1] * x[idx(cols[k + 1])];
        }
        if k + 2 < len {
            l2 += values[k + 2] * x[idx(cols[k + 2])];
        }
        (l0 + l1) + (l2 + l3)
    }

    /// out = L·x. Row-parallel when the graph is large enough; each row is a
    /// sequential dot product with a fixed reduction order, so results do not
    /// depend on thread count.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        let row_ptr = &self.row_ptr;
        let values = &self.values;
        match &self.col_idx32 {
            Some(col_idx) => par::fill_indexed(out, |i| {
                let lo = row_ptr[i];
                let hi = row_ptr[i + 1];
                Self::row_dot(&values[lo..hi], &col_idx[lo..hi], x, |c| c as usize)
            }),
            None => {
                let col_idx = &self.col_idx;
                par::fill_indexed(out, |i| {
                    let lo = row_ptr[i];
                    let hi = row_ptr[i + 1];
                    Self::row_dot(&values[lo..hi], &col_idx[lo..hi], x, |c| c)
                });
            }
        }
    }

    /// The BFS-relabeled CSR copy the blocked filter path runs on, when ids
    /// fit `u32`.
    pub(crate) fn locality(&self) -> Option<&PermutedCsr> {
        self.locality.as_ref()
    }

    /// out = L·X for a row-major `n × width` block: one sweep over the CSR
    /// arrays serves every column, which is what makes wide probe blocks
    /// cheap compared to repeated single-vector products. Deterministic, but
    /// entry-order accumulation differs from the four-lane tree of
    /// [`Self::matvec_into`], so columns agree with single-vector products to
    /// rounding, not bitwise.
    pub fn matvec_block_into(&self, x: &[f64], out: &mut [f64], width: usize) {
        assert!(width > 0, "block width must be positive");
        assert_eq!(x.len(), self.n * width);
        assert_eq!(out.len(), self.n * width);
        par::for_each_col(out, width, |i, row| self.row_block_product(x, width, i, row));
    }

    /// xᵀ L x via a matrix-vector product (tests verify this against the
    /// edge-sum form Σ w_ij (x_i − x_j)²).
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Dense row-major copy; test/oracle convenience for small graphs.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] = v;
            }
        }
        m
    }
}

/// Path graph on `n` unit-weight vertices; the workhorse small fixture.
#[cfg(test)]
pub(crate) fn path_graph(n: usize) -> SparseGraph {
    let mut b = GraphBuilder::new(n);
    for i in 0..n.saturating_sub(1) {
        b.add_edge(i, i + 1, 1.0).unwrap();
    }
    b.build()
}
