//! Experiment configuration: one flat JSON document, strict about unknown
//! keys so a typo in a sweep config fails loudly instead of silently running
//! the defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use gsamp_core::graph::{
    gen_barabasi_albert, gen_community, gen_erdos_renyi, gen_grid_2d, gen_path, gen_sensor_knn,
    gen_watts_strogatz,
};
use gsamp_core::sampling::{KernelSpec, Method};
use gsamp_core::spectral::CoherenceOptions;
use gsamp_core::{LaplacianKind, SparseGraph};

use crate::{HarnessError, Result};

/// Graph models the harness can generate. `SensorKnn` uses a Gaussian kernel
/// on Euclidean distances; every other model uses unit weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphModel {
    SensorKnn,
    ErdosRenyi,
    BarabasiAlbert,
    Community,
    WattsStrogatz,
    Grid,
    Path,
}

impl GraphModel {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphModel::SensorKnn => "sensor_knn",
            GraphModel::ErdosRenyi => "erdos_renyi",
            GraphModel::BarabasiAlbert => "barabasi_albert",
            GraphModel::Community => "community",
            GraphModel::WattsStrogatz => "watts_strogatz",
            GraphModel::Grid => "grid",
            GraphModel::Path => "path",
        }
    }

    pub fn parse(s: &str) -> Option<GraphModel> {
        Some(match s {
            "sensor_knn" => GraphModel::SensorKnn,
            "erdos_renyi" => GraphModel::ErdosRenyi,
            "barabasi_albert" => GraphModel::BarabasiAlbert,
            "community" => GraphModel::Community,
            "watts_strogatz" => GraphModel::WattsStrogatz,
            "grid" => GraphModel::Grid,
            "path" => GraphModel::Path,
            _ => return None,
        })
    }
}

impl std::fmt::Display for GraphModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_knn_k() -> usize {
    10
}
fn default_er_p() -> f64 {
    0.02
}
fn default_ba_m_attach() -> usize {
    8
}
fn default_n_communities() -> usize {
    5
}
fn default_ws_k() -> usize {
    10
}
fn default_ws_p_rewire() -> f64 {
    0.2
}
fn default_trials() -> usize {
    1
}
fn default_output_dir() -> String {
    "out".into()
}
fn default_coherence_c() -> f64 {
    10.0
}
fn default_coherence_epsilon() -> f64 {
    0.1
}
fn default_filter_degree() -> usize {
    30
}
fn default_projection_rule() -> String {
    "log_n".into()
}
fn default_dc_delta() -> f64 {
    0.9
}
fn default_sp_k_power() -> usize {
    4
}
fn default_kernel() -> String {
    "resolvent".into()
}
fn default_kernel_param() -> f64 {
    1.0
}
fn default_laplacian() -> String {
    "combinatorial".into()
}
fn default_signal_power() -> f64 {
    1.0
}
fn default_noise_power() -> f64 {
    0.1
}

/// Flat experiment description. Field names are the JSON keys.
///
/// Required keys: `graph_models`, `n_list`, `s_list`, `f`, `methods`.
/// Everything else has the documented default. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Graph models to sweep, e.g. `["sensor_knn", "erdos_renyi"]`.
    pub graph_models: Vec<String>,
    /// Graph sizes to sweep.
    pub n_list: Vec<usize>,
    /// Sample-set sizes to sweep.
    pub s_list: Vec<usize>,
    /// Reconstruction bandwidth: number of low frequencies kept.
    pub f: usize,
    /// Sampling methods, a subset of
    /// {wrs, dc, avm, sp_ideal, sp_k, exact_greedy, avm_kernel}.
    pub methods: Vec<String>,
    /// Independent trials per (model, n); each trial draws a fresh graph and
    /// signal in the SNR sweep, a fresh signal in the timing sweep.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Base seed; every instance/method seed is mixed from it.
    #[serde(default)]
    pub seed_base: u64,
    /// Directory for CSV/JSONL outputs (CLI `--out` overrides).
    #[serde(default = "default_output_dir")]
    pub output_dir: String,

    /// Neighbors per vertex for the sensor knn model (also used when a point
    /// cloud is turned into a graph for classification).
    #[serde(default = "default_knn_k")]
    pub knn_k: usize,
    /// Edge probability for the Erdős–Rényi model.
    #[serde(default = "default_er_p")]
    pub er_p: f64,
    /// Attachments per new vertex for the Barabási–Albert model.
    #[serde(default = "default_ba_m_attach")]
    pub ba_m_attach: usize,
    /// Number of blocks for the planted-partition model.
    #[serde(default = "default_n_communities")]
    pub n_communities: usize,
    /// Ring degree (even) for the Watts–Strogatz model.
    #[serde(default = "default_ws_k")]
    pub ws_k: usize,
    /// Rewiring probability for the Watts–Strogatz model.
    #[serde(default = "default_ws_p_rewire")]
    pub ws_p_rewire: f64,

    /// Projection constant for the `cs_log_s` probe rule.
    #[serde(default = "default_coherence_c")]
    pub coherence_c: f64,
    /// Cutoff-search tolerance: accepted eigencount band is `[s, (1+ε)s]`.
    #[serde(default = "default_coherence_epsilon")]
    pub coherence_epsilon: f64,
    /// Chebyshev degree for every polynomial filter.
    #[serde(default = "default_filter_degree")]
    pub filter_degree: usize,
    /// Probe-count rule for coherence estimation: `"log_n"` uses ⌈10·ln n⌉
    /// probes (the benchmark setting, cheap and size-driven), `"cs_log_s"`
    /// uses ⌈c·s·ln s⌉ probes (the analysis setting, accuracy-driven).
    #[serde(default = "default_projection_rule")]
    pub projection_rule: String,
    /// Distance threshold for the distance-coherence sampler.
    #[serde(default = "default_dc_delta")]
    pub dc_delta: f64,
    /// Laplacian power `k` for the finite-k subset sampler.
    #[serde(default = "default_sp_k_power")]
    pub sp_k_power: usize,
    /// Kernel family for `avm_kernel`: "resolvent", "heat", or "identity".
    #[serde(default = "default_kernel")]
    pub kernel: String,
    /// Kernel parameter (resolvent shift or heat time; ignored by identity).
    #[serde(default = "default_kernel_param")]
    pub kernel_param: f64,
    /// "combinatorial" or "normalized".
    #[serde(default = "default_laplacian")]
    pub laplacian: String,
    /// Expected per-vertex signal power of synthetic signals.
    #[serde(default = "default_signal_power")]
    pub signal_power: f64,
    /// Per-vertex noise variance of synthetic signals.
    #[serde(default = "default_noise_power")]
    pub noise_power: f64,
    /// Timing sweep only: skip reconstruction (and the dense eigenvector
    /// oracle it needs). SNR columns become NaN. Useful at sizes where the
    /// dense oracle would dwarf the sampling times being measured.
    #[serde(default)]
    pub timing_skip_reconstruction: bool,
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Checks every invariant and returns human-readable warnings for the
    /// permitted-but-suspect cases. Errors are reserved for configurations
    /// that cannot run at all.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.trials < 1 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.s_list.is_empty() {
            return Err(HarnessError::Config("s_list must be nonempty".into()));
        }
        if self.n_list.is_empty() {
            return Err(HarnessError::Config("n_list must be nonempty".into()));
        }
        if self.graph_models.is_empty() {
            return Err(HarnessError::Config("graph_models must be nonempty".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Config("methods must be nonempty".into()));
        }
        self.parse_models()?;
        self.parse_methods()?;
        self.kernel_spec()?;
        self.laplacian_kind()?;
        if self.f == 0 {
            return Err(HarnessError::Config("bandwidth f must be positive".into()));
        }
        let &n_min = self.n_list.iter().min().expect("nonempty");
        if self.f > n_min {
            return Err(HarnessError::Config(format!(
                "bandwidth f = {} exceeds the smallest graph size {n_min}",
                self.f
            )));
        }
        if self.s_list.iter().any(|&s| s == 0) {
            return Err(HarnessError::Config("sample sizes must be positive".into()));
        }
        if !(self.er_p > 0.0 && self.er_p <= 1.0) {
            return Err(HarnessError::Config(format!(
                "er_p must be in (0, 1], got {}",
                self.er_p
            )));
        }
        if !(0.0..=1.0).contains(&self.dc_delta) {
            return Err(HarnessError::Config(format!(
                "dc_delta must be in [0, 1], got {}",
                self.dc_delta
            )));
        }
        match self.projection_rule.as_str() {
            "log_n" | "cs_log_s" => {}
            other => {
                return Err(HarnessError::Config(format!(
                    "projection_rule must be \"log_n\" or \"cs_log_s\", got {other:?}"
                )))
            }
        }
        if self.sp_k_power == 0 {
            return Err(HarnessError::Config("sp_k_power must be positive".into()));
        }

        let mut warnings = Vec::new();
        let &s_min = self.s_list.iter().min().expect("nonempty");
        if self.f > s_min {
            warnings.push(format!(
                "bandwidth f = {} exceeds the smallest sample budget s = {s_min}; \
                 least-squares reconstruction is underdetermined there",
                self.f
            ));
        }
        Ok(warnings)
    }

    /// The configured methods, validated. `avm_exact` is deliberately not a
    /// sweep method (it is the dense reference used inside tests).
    pub fn parse_methods(&self) -> Result<Vec<Method>> {
        const ALLOWED: [Method; 7] = [
            Method::Wrs,
            Method::Dc,
            Method::Avm,
            Method::SpIdeal,
            Method::SpFiniteK,
            Method::ExactGreedy,
            Method::AvmKernel,
        ];
        let mut out = Vec::with_capacity(self.methods.len());
        for name in &self.methods {
            let m = Method::parse(name).filter(|m| ALLOWED.contains(m)).ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown method {name:?}; expected one of \
                     wrs, dc, avm, sp_ideal, sp_k, exact_greedy, avm_kernel"
                ))
            })?;
            if out.contains(&m) {
                return Err(HarnessError::Config(format!("duplicate method {name:?}")));
            }
            out.push(m);
        }
        Ok(out)
    }

    pub fn parse_models(&self) -> Result<Vec<GraphModel>> {
        let mut out = Vec::with_capacity(self.graph_models.len());
        for name in &self.graph_models {
            let m = GraphModel::parse(name).ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown graph model {name:?}; expected one of sensor_knn, erdos_renyi, \
                     barabasi_albert, community, watts_strogatz, grid, path"
                ))
            })?;
            if out.contains(&m) {
                return Err(HarnessError::Config(format!("duplicate graph model {name:?}")));
            }
            out.push(m);
        }
        Ok(out)
    }

    /// Coherence-estimation options for one sampler call at size `n`.
    /// The probe count follows `projection_rule`; the eigencount probes
    /// inside the cutoff search stay at their ⌈10·ln n⌉ default.
    pub fn coherence_options(&self, n: usize, _s: usize) -> CoherenceOptions {
        let n_projections_override = match self.projection_rule.as_str() {
            "log_n" => Some((10.0 * (n.max(2) as f64).ln()).ceil() as usize),
            _ => None,
        };
        CoherenceOptions {
            c: self.coherence_c,
            epsilon: self.coherence_epsilon,
            degree: self.filter_degree,
            n_projections_override,
            ..CoherenceOptions::default()
        }
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        match self.kernel.as_str() {
            "resolvent" => Ok(KernelSpec::resolvent(self.kernel_param)?),
            "heat" => Ok(KernelSpec::heat(self.kernel_param)?),
            "identity" => Ok(KernelSpec::identity()),
            other => Err(HarnessError::Config(format!(
                "unknown kernel {other:?}; expected resolvent, heat, or identity"
            ))),
        }
    }

    pub fn laplacian_kind(&self) -> Result<LaplacianKind> {
        match self.laplacian.as_str() {
            "combinatorial" => Ok(LaplacianKind::Combinatorial),
            "normalized" => Ok(LaplacianKind::Normalized),
            other => Err(HarnessError::Config(format!(
                "unknown laplacian {other:?}; expected combinatorial or normalized"
            ))),
        }
    }

    /// Generates one graph instance of `model` at size `n`. The grid and path
    /// models are deterministic; the rest consume `seed`.
    pub fn build_graph(&self, model: GraphModel, n: usize, seed: u64) -> Result<SparseGraph> {
        let g = match model {
            GraphModel::SensorKnn => gen_sensor_knn(n, self.knn_k, seed)?,
            GraphModel::ErdosRenyi => gen_erdos_renyi(n, self.er_p, seed)?,
            GraphModel::BarabasiAlbert => gen_barabasi_albert(n, self.ba_m_attach, seed)?,
            GraphModel::Community => gen_community(n, self.n_communities, seed)?,
            GraphModel::WattsStrogatz => {
                gen_watts_strogatz(n, self.ws_k, self.ws_p_rewire, seed)?
            }
            GraphModel::Grid => {
                let (rows, cols) = grid_dims(n);
                gen_grid_2d(rows, cols)?
            }
            GraphModel::Path => gen_path(n)?,
        };
        Ok(g)
    }
}

/// Factors `n` into the most nearly square `rows × cols` grid: `rows` is the
/// largest divisor of `n` not exceeding √n. Prime `n` degenerates to `1 × n`.
pub fn grid_dims(n: usize) -> (usize, usize) {
    let mut rows = 1;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            rows = d;
        }
        d += 1;
    }
    (rows, n / rows)
}
