//! Sampling set selection algorithms.
//!
//! Estimation-based samplers ([`wrs_sample`], [`dc_sample`], [`avm_sample`],
//! [`avm_kernel_sample`], [`sp_finite_k_sample`]) work from the sparse
//! Laplacian alone; oracle-based references ([`avm_sample_exact`],
//! [`exact_greedy_sample`], [`sp_ideal_sample`]) use the dense
//! eigendecomposition and exist as ground truth for the estimators.
//!
//! Every sampler is deterministic given its inputs (and seed, where one is
//! taken), breaks score ties toward the lowest vertex index, and reports its
//! own wall-clock time — including any coherence estimation it performs.

mod avm;
mod dc;
mod greedy;
mod kernel;
mod sp;
mod wrs;

use std::collections::BTreeMap;
use std::io;

pub use avm::{avm_sample, avm_sample_exact, avm_sample_with, GreedyState};
pub use dc::dc_sample;
pub use greedy::exact_greedy_sample;
pub use kernel::{avm_kernel_sample, avm_kernel_sample_with, KernelSpec};
pub use sp::{sp_finite_k_sample, sp_ideal_sample};
pub use wrs::wrs_sample;

/// Identifies which algorithm produced a [`SamplingResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Wrs,
    Dc,
    Avm,
    AvmExact,
    AvmKernel,
    ExactGreedy,
    SpIdeal,
    SpFiniteK,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Wrs => "wrs",
            Method::Dc => "dc",
            Method::Avm => "avm",
            Method::AvmExact => "avm_exact",
            Method::AvmKernel => "avm_kernel",
            Method::ExactGreedy => "exact_greedy",
            Method::SpIdeal => "sp_ideal",
            Method::SpFiniteK => "sp_k",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Some(match s {
            "wrs" => Method::Wrs,
            "dc" => Method::Dc,
            "avm" => Method::Avm,
            "avm_exact" => Method::AvmExact,
            "avm_kernel" => Method::AvmKernel,
            "exact_greedy" => Method::ExactGreedy,
            "sp_ideal" => Method::SpIdeal,
            "sp_k" => Method::SpFiniteK,
            _ => return None,
        })
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Output of one sampler run: the selected vertices in selection order, the
/// selection score at each iteration, timing, and an echo of the inputs.
#[derive(Debug, Clone)]
pub struct SamplingResult {
    pub method: Method,
    /// Selected vertices in selection order. Unique for every method except
    /// WRS, which draws with replacement.
    pub vertices: Vec<usize>,
    /// Score that won each iteration (same length as `vertices`).
    pub scores: Vec<f64>,
    /// Wall-clock seconds for the whole call, coherence estimation included.
    pub elapsed_seconds: f64,
    /// Echo of the call parameters plus estimation diagnostics.
    pub params: BTreeMap<String, String>,
    /// WRS only: the full per-vertex sampling distribution, kept for
    /// weighted reconstruction.
    pub probabilities: Option<Vec<f64>>,
    /// Degenerate events encountered (rank deficiency, eigensolve budget
    /// exhaustion, candidate-set fallbacks). Empty on a clean run.
    pub flags: Vec<String>,
}

impl SamplingResult {
    pub fn s(&self) -> usize {
        self.vertices.len()
    }

    /// Writes `iter,vertex,score` rows.
    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "iter,vertex,score")?;
        for (i, (&v, &sc)) in self.vertices.iter().zip(&self.scores).enumerate() {
            writeln!(w, "{i},{v},{sc}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// One JSON-lines metadata record: method, params, seed, elapsed.
    pub fn metadata_json(&self) -> String {
        let seed = self
            .params
            .get("seed")
            .and_then(|s| s.parse::<u64>().ok())
            .map(serde_json::Value::from)
            .unwrap_or(serde_json::Value::Null);
        serde_json::json!({
            "method": self.method.as_str(),
            "params": self.params,
            "seed": seed,
            "elapsed": self.elapsed_seconds,
            "flags": self.flags,
        })
        .to_string()
    }
}

/// Relative slack under which two scores count as tied. Scores that are equal
/// in exact arithmetic (e.g. entries of a constant eigenvector) come out of
/// the dense eigendecomposition differing by a few ulps; without slack the
/// documented lowest-index tie-break would be decided by rounding noise.
/// Genuine score gaps in the samplers are many orders of magnitude larger.
const TIE_REL_EPS: f64 = 1e-12;

/// Lowest-index argmax of `score` over unselected vertices, treating scores
/// within `TIE_REL_EPS` (relative) as tied. `NaN` scores are skipped; returns
/// `None` when every vertex is already selected.
pub(crate) fn argmax_unselected<F: Fn(usize) -> f64>(
    n: usize,
    selected: &[bool],
    score: F,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for v in 0..n {
        if selected[v] {
            continue;
        }
        let s = score(v);
        if s.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if s <= b + TIE_REL_EPS * b.abs().max(s.abs()) => {}
            _ => best = Some((v, s)),
        }
    }
    best.map(|(v, _)| v)
}

pub(crate) fn params_map<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_lowest_index_on_ties() {
        let scores = [1.0, 3.0, 3.0, 0.5];
        let mut selected = vec![false; 4];
        assert_eq!(argmax_unselected(4, &selected, |v| scores[v]), Some(1));
        selected[1] = true;
        assert_eq!(argmax_unselected(4, &selected, |v| scores[v]), Some(2));
        selected = vec![true; 4];
        assert_eq!(argmax_unselected(4, &selected, |v| scores[v]), None);
    }

    #[test]
    fn argmax_skips_nan() {
        let scores = [f64::NAN, 1.0, 2.0];
        let selected = vec![false; 3];
        assert_eq!(argmax_unselected(3, &selected, |v| scores[v]), Some(2));
    }

    #[test]
    fn method_tags_round_trip() {
        for m in [
            Method::Wrs,
            Method::Dc,
            Method::Avm,
            Method::AvmExact,
            Method::AvmKernel,
            Method::ExactGreedy,
            Method::SpIdeal,
            Method::SpFiniteK,
        ] {
            assert_eq!(Method::parse(m.as_str()), Some(m));
        }
        assert_eq!(Method::parse("bogus"), None);
    }

    #[test]
    fn csv_and_metadata_shapes() {
        let r = SamplingResult {
            method: Method::Wrs,
            vertices: vec![3, 1],
            scores: vec![0.5, 0.25],
            elapsed_seconds: 0.125,
            params: params_map([("s", "2".into()), ("seed", "7".into())]),
            probabilities: None,
            flags: vec![],
        };
        assert_eq!(r.to_csv_string(), "iter,vertex,score\n0,3,0.5\n1,1,0.25\n");
        let meta: serde_json::Value = serde_json::from_str(&r.metadata_json()).unwrap();
        assert_eq!(meta["method"], "wrs");
        assert_eq!(meta["seed"], 7);
        assert_eq!(meta["params"]["s"], "2");
        assert_eq!(meta["elapsed"], 0.125);
    }
}
