//! Benchmark harness for the graph sampling toolkit.
//!
//! Everything here is orchestration: [`config`] turns a flat JSON document
//! into validated experiment parameters, [`experiments`] runs the sweeps on
//! top of `gsamp-core`, and [`report`] holds the row/aggregate schema shared
//! by the CSV outputs and the external-baseline ingest path. The `gsamp-bench`
//! binary is a thin CLI over these modules.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, GraphModel};
pub use experiments::{
    diag_energy_fraction, run_classification, run_snr_sweep, run_timing_sweep, sample_once,
    ClassificationReport, ClassificationRow,
};
pub use report::{ingest_external_baseline, AggregateRow, ExperimentReport, ReportRow};

/// Errors produced by the harness itself, plus everything bubbling up from
/// the core library and the serialization layers.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// The configuration document is structurally valid JSON but violates an
    /// experiment invariant (empty method list, unknown graph model, ...).
    #[error("config error: {0}")]
    Config(String),

    /// An ingested report CSV does not match the report schema. `line` is the
    /// 1-based line number in the file, header included.
    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error(transparent)]
    Core(#[from] gsamp_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Stable machine-readable tag for the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config(_) => "config_error",
            HarnessError::Schema { .. } => "schema_error",
            HarnessError::Core(e) => e.kind(),
            HarnessError::Io(_) => "io_error",
            HarnessError::Json(_) => "json_error",
            HarnessError::Csv(_) => "csv_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
