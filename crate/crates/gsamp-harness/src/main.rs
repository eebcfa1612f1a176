//! `gsamp-bench`: config-driven benchmark CLI.
//!
//! Every subcommand reads one flat JSON config (`--config`), writes CSV plus
//! JSON-lines metadata into an output directory, and reports failures as a
//! single machine-readable JSON object on stderr with a nonzero exit code.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use gsamp_core::graph::{read_points_csv, LabelColumn};
use gsamp_core::rng::{mix, tag};
use gsamp_core::EigenOracle;
use gsamp_harness::config::grid_dims;
use gsamp_harness::experiments::gen_blob_points;
use gsamp_harness::{
    diag_energy_fraction, ingest_external_baseline, run_classification, run_snr_sweep,
    run_timing_sweep, sample_once, ExperimentConfig, ExperimentReport, HarnessError, Result,
};

#[derive(Parser)]
#[command(
    name = "gsamp-bench",
    version,
    about = "Benchmark harness for graph signal sampling experiments"
)]
struct Cli {
    /// Experiment config (flat JSON). Required by every subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed; overrides the config's `seed_base`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel trials (SNR sweep only).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one sampler (first model/size/budget/method of the config) on one
    /// graph and write the selection CSV plus metadata.
    Sample,
    /// SNR-vs-samples sweep: fresh graph and signal per trial, every
    /// configured method and budget, reconstruction SNR per row.
    SnrSweep {
        /// Report CSV of third-party baseline rows to merge (tagged
        /// `external` in the output).
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Round-robin wall-clock timing sweep (always serial).
    TimingSweep {
        /// Report CSV of third-party baseline rows to merge.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Semi-supervised classification over resampled point-cloud subsets.
    Classify {
        /// Headerless CSV: coordinates, then one integer label column.
        /// Without it, a synthetic three-blob cloud stands in.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Diagonal-energy fractions of the volume-greedy's selection prefixes.
    DiagEnergy,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => e.exit(),
            _ => {
                eprintln!(
                    "{}",
                    serde_json::json!({"error": "usage_error", "message": e.to_string()})
                );
                return ExitCode::from(2);
            }
        },
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": e.kind(), "message": e.to_string()})
            );
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config_path = cli.config.as_deref().ok_or_else(|| {
        HarnessError::Config("--config <path> is required; see --help".into())
    })?;
    let mut cfg = ExperimentConfig::from_json_file(config_path)?;
    if let Some(seed) = cli.seed {
        cfg.seed_base = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.to_string_lossy().into_owned();
    }
    configure_threads(cli.threads);
    let out_dir = PathBuf::from(&cfg.output_dir);

    match cli.cmd {
        Cmd::Sample => cmd_sample(&cfg, &out_dir),
        Cmd::SnrSweep { baseline } => {
            let mut report = run_snr_sweep(&cfg)?;
            merge_baseline(&mut report, baseline.as_deref())?;
            finish_sweep(&cfg, &out_dir, "snr", &report)
        }
        Cmd::TimingSweep { baseline } => {
            let mut report = run_timing_sweep(&cfg)?;
            merge_baseline(&mut report, baseline.as_deref())?;
            finish_sweep(&cfg, &out_dir, "timing", &report)
        }
        Cmd::Classify { points } => cmd_classify(&cfg, &out_dir, points.as_deref()),
        Cmd::DiagEnergy => cmd_diag_energy(&cfg, &out_dir),
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(k) = threads {
        if k > 0 {
            // A second build_global in one process is an error; the first
            // setting wins, which is fine for a CLI run.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) {
    if threads.is_some() {
        println!("note: built without the parallel feature; --threads has no effect");
    }
}

fn merge_baseline(report: &mut ExperimentReport, path: Option<&Path>) -> Result<()> {
    if let Some(path) = path {
        let rows = ingest_external_baseline(path)?;
        report.logs.push(format!(
            "merged {} external rows from {}",
            rows.len(),
            path.display()
        ));
        report.merge(rows);
    }
    Ok(())
}

/// Writes the report CSVs, the run log, and the metadata stream; prints the
/// paths written, one per line.
fn finish_sweep(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    prefix: &str,
    report: &ExperimentReport,
) -> Result<()> {
    let mut paths = report.write_outputs(out_dir, prefix)?;
    let meta_path = out_dir.join(format!("{prefix}_metadata.jsonl"));
    let mut meta = std::fs::File::create(&meta_path)?;
    writeln!(
        meta,
        "{}",
        serde_json::json!({"event": "config", "config": cfg})
    )?;
    writeln!(
        meta,
        "{}",
        serde_json::json!({
            "event": "summary",
            "rows": report.rows.len(),
            "log_lines": report.logs.len(),
        })
    )?;
    paths.push(meta_path);
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

/// First entry of each sweep axis: the `sample` subcommand runs exactly one
/// (model, n, s, method) cell.
fn cmd_sample(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    cfg.validate()?;
    let model = cfg.parse_models()?[0];
    let method = cfg.parse_methods()?[0];
    let n = cfg.n_list[0];
    let s = cfg.s_list[0];

    let seed = mix(cfg.seed_base, tag::TRIAL);
    let g = cfg.build_graph(model, n, mix(seed, tag::GRAPH))?;
    let lap = g.laplacian(cfg.laplacian_kind()?);
    let oracle = match method {
        gsamp_core::sampling::Method::SpIdeal
        | gsamp_core::sampling::Method::ExactGreedy
        | gsamp_core::sampling::Method::AvmExact => Some(EigenOracle::new(&lap)?),
        _ => None,
    };
    let result = sample_once(cfg, method, &g, &lap, oracle.as_ref(), s, seed)?;

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("sample_{method}.csv"));
    result.write_csv(std::fs::File::create(&csv_path)?)?;
    let meta_path = out_dir.join("sample_metadata.jsonl");
    let mut meta = std::fs::File::create(&meta_path)?;
    writeln!(meta, "{}", result.metadata_json())?;
    println!("{}", csv_path.display());
    println!("{}", meta_path.display());
    Ok(())
}

fn cmd_classify(cfg: &ExperimentConfig, out_dir: &Path, points: Option<&Path>) -> Result<()> {
    let (points, labels) = match points {
        Some(path) => {
            let file = std::io::BufReader::new(std::fs::File::open(path)?);
            read_points_csv(file, LabelColumn::Last)?
        }
        None => {
            // Synthetic stand-in: three well-separated Gaussian blobs, twice
            // the subset size so resamples actually differ.
            let n_points = cfg.n_list.first().copied().unwrap_or(300) * 2;
            gen_blob_points(n_points, 3, 6.0, cfg.seed_base)
        }
    };
    let report = run_classification(cfg, &points, &labels)?;

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("classification_report.csv");
    report.write_csv(std::fs::File::create(&csv_path)?)?;
    let log_path = out_dir.join("classification_run.log");
    let mut log = std::fs::File::create(&log_path)?;
    for line in &report.logs {
        writeln!(log, "{line}")?;
    }
    println!("{}", csv_path.display());
    println!("{}", log_path.display());
    Ok(())
}

/// For every configured model: `trials` instances at the first configured
/// size, volume-greedy selection of the first configured budget, and the
/// per-prefix diagonal-energy fraction of the exact Gram over the first `f`
/// frequencies. Rows: model, instance, m, fraction.
fn cmd_diag_energy(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    cfg.validate()?;
    let models = cfg.parse_models()?;
    let n = cfg.n_list[0];
    let s = cfg.s_list[0];
    let r_set: Vec<usize> = (0..cfg.f).collect();

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("diag_energy.csv");
    let mut w = csv::Writer::from_writer(std::fs::File::create(&csv_path)?);
    w.write_record(["model", "instance", "m", "fraction"])
        .map_err(HarnessError::Csv)?;
    for (model_idx, &model) in models.iter().enumerate() {
        for instance in 0..cfg.trials {
            let seed = mix(mix(mix(cfg.seed_base, tag::TRIAL), model_idx as u64), instance as u64);
            let g = cfg.build_graph(model, n, mix(seed, tag::GRAPH))?;
            let lap = g.laplacian(cfg.laplacian_kind()?);
            let oracle = EigenOracle::new(&lap)?;
            let sampling = sample_once(
                cfg,
                gsamp_core::sampling::Method::Avm,
                &g,
                &lap,
                Some(&oracle),
                s,
                seed,
            )?;
            let fractions = diag_energy_fraction(&oracle, &sampling.vertices, &r_set)?;
            for (m, frac) in fractions.iter().enumerate() {
                w.write_record([
                    model.as_str(),
                    &instance.to_string(),
                    &(m + 1).to_string(),
                    &frac.to_string(),
                ])
                .map_err(HarnessError::Csv)?;
            }
        }
    }
    w.flush().map_err(HarnessError::Io)?;
    println!("{}", csv_path.display());
    // Grid sizes that are prime degenerate to a path; say so in the output
    // so a surprising fraction series is explainable.
    if models.contains(&gsamp_harness::GraphModel::Grid) {
        let (rows, cols) = grid_dims(n);
        println!("note: grid at n={n} is {rows}x{cols}");
    }
    Ok(())
}
