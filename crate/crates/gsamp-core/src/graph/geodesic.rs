//! Multi-source geodesic distances.
//!
//! Edge weights measure affinity, so traversal length is the reciprocal
//! weight: a heavy edge is a short hop. Distances from a set are the minimum
//! over its members, computed with one Dijkstra sweep seeded by every source.

use super::SparseGraph;
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Per-vertex distance to the nearest source; `f64::INFINITY` when
/// unreachable.
#[derive(Debug, Clone)]
pub struct GeodesicDistanceField {
    dist: Vec<f64>,
}

impl GeodesicDistanceField {
    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn distance(&self, v: usize) -> f64 {
        self.dist[v]
    }

    /// Largest finite-or-infinite distance over `candidates`.
    pub fn max_over(&self, candidates: impl Iterator<Item = usize>) -> f64 {
        candidates.map(|v| self.dist[v]).fold(0.0, f64::max)
    }
}

#[derive(PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the cheapest state on
        // top. Costs are finite non-NaN by construction.
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap()
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from every vertex of `sources` at once, edge length 1/weight.
pub fn geodesic_from_set(g: &SparseGraph, sources: &[usize]) -> Result<GeodesicDistanceField> {
    if sources.is_empty() {
        return Err(Error::InvalidParameter(
            "geodesic source set is empty".into(),
        ));
    }
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if s >= n {
            return Err(Error::InvalidParameter(format!(
                "source vertex {s} out of range for {n} vertices"
            )));
        }
        if dist[s] > 0.0 {
            dist[s] = 0.0;
            heap.push(State { cost: 0.0, node: s });
        }
    }
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue; // stale entry
        }
        for (u, w) in g.neighbors(node) {
            let next = cost + 1.0 / w;
            if next < dist[u] {
                dist[u] = next;
                heap.push(State { cost: next, node: u });
            }
        }
    }
    Ok(GeodesicDistanceField { dist })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_graph, GraphBuilder};

    #[test]
    fn path3_from_middle() {
        // Unit weights: lengths are hop counts.
        let g = path_graph(3);
        let field = geodesic_from_set(&g, &[1]).unwrap();
        assert_eq!(field.distances(), &[1.0, 0.0, 1.0]);
        let field = geodesic_from_set(&g, &[0]).unwrap();
        assert_eq!(field.distances(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn heavy_edge_is_short() {
        // Triangle with w(1,2)=2: that hop has length 0.5.
        let mut b = GraphBuilder::new(3);
        b.add_edge(0, 1, 1.0).unwrap();
        b.add_edge(0, 2, 1.0).unwrap();
        b.add_edge(1, 2, 2.0).unwrap();
        let field = geodesic_from_set(&b.build(), &[1]).unwrap();
        assert_eq!(field.distance(2), 0.5);
        assert_eq!(field.distance(0), 1.0);
    }

    #[test]
    fn multi_source_takes_minimum() {
        let g = path_graph(5);
        let field = geodesic_from_set(&g, &[0, 4]).unwrap();
        assert_eq!(field.distances(), &[0.0, 1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn unreachable_is_infinite() {
        let mut b = GraphBuilder::new(4);
        b.add_edge(0, 1, 1.0).unwrap();
        b.add_edge(2, 3, 1.0).unwrap();
        let field = geodesic_from_set(&b.build(), &[0]).unwrap();
        assert!(field.distance(2).is_infinite());
        assert!(field.distance(3).is_infinite());
    }

    #[test]
    fn rejects_empty_and_out_of_range_sources() {
        let g = path_graph(3);
        assert!(geodesic_from_set(&g, &[]).is_err());
        assert!(geodesic_from_set(&g, &[7]).is_err());
    }
}
