//! Report schema shared by every experiment: one row per (instance, method)
//! measurement, plus aggregation and the external-baseline ingest path.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! report read back through [`ingest_external_baseline`] reproduces the
//! original values bit for bit (NaN and ±inf included).

use std::io::Write;
use std::path::Path;

use crate::{HarnessError, Result};

/// The eight measurement columns, in on-disk order. A trailing `source`
/// column marks provenance (`run` for rows produced here, `external` for
/// ingested baselines); files without it are assumed external.
pub const REPORT_COLUMNS: [&str; 8] = [
    "model",
    "n",
    "s",
    "method",
    "trial",
    "snr_db",
    "sample_time_s",
    "recon_time_s",
];

/// One measurement. Failed method runs keep their row with NaN metrics so
/// bookkeeping (rows = models·sizes·budgets·methods·trials) stays exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub model: String,
    pub n: usize,
    pub s: usize,
    pub method: String,
    pub trial: usize,
    pub snr_db: f64,
    pub sample_time_s: f64,
    pub recon_time_s: f64,
    /// `"run"` or `"external"`.
    pub source: String,
}

/// Per-(model, n, s, method) summary. Means and medians are taken over rows
/// with finite values; `n_rows` counts all rows in the group.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub model: String,
    pub n: usize,
    pub s: usize,
    pub method: String,
    pub n_rows: usize,
    pub mean_snr_db: f64,
    pub mean_sample_time_s: f64,
    pub median_sample_time_s: f64,
    pub mean_recon_time_s: f64,
    /// Mean sample time of this method divided by mean sample time of `wrs`,
    /// both restricted to the trial ids present for both methods in this
    /// (model, n, s) group. NaN when no common trials exist.
    pub overhead_vs_wrs: f64,
}

/// Rows plus the run log (warnings, round-robin order lines, failures).
#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub logs: Vec<String>,
}

impl ExperimentReport {
    /// Appends rows from another source (typically ingested baselines).
    pub fn merge(&mut self, rows: Vec<ReportRow>) {
        self.rows.extend(rows);
    }

    /// Writes the row CSV (header + one line per row).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = REPORT_COLUMNS.to_vec();
        header.push("source");
        w.write_record(&header)?;
        for r in &self.rows {
            w.write_record([
                r.model.as_str(),
                &r.n.to_string(),
                &r.s.to_string(),
                r.method.as_str(),
                &r.trial.to_string(),
                &r.snr_db.to_string(),
                &r.sample_time_s.to_string(),
                &r.recon_time_s.to_string(),
                r.source.as_str(),
            ])?;
        }
        w.flush().map_err(HarnessError::Io)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// Groups rows by (model, n, s, method) and summarizes. External rows are
    /// folded in only when `include_external` is set; overhead ratios always
    /// compare within the same provenance.
    pub fn aggregates(&self, include_external: bool) -> Vec<AggregateRow> {
        use std::collections::BTreeMap;
        type Key = (String, usize, usize, String);
        let mut groups: BTreeMap<Key, Vec<&ReportRow>> = BTreeMap::new();
        for r in &self.rows {
            if !include_external && r.source != "run" {
                continue;
            }
            groups
                .entry((r.model.clone(), r.n, r.s, r.method.clone()))
                .or_default()
                .push(r);
        }

        // Per (model, n, s): wrs sample time by trial, for overhead ratios.
        let mut wrs_times: BTreeMap<(String, usize, usize), BTreeMap<usize, f64>> =
            BTreeMap::new();
        for ((model, n, s, method), rows) in &groups {
            if method == "wrs" {
                let by_trial = wrs_times.entry((model.clone(), *n, *s)).or_default();
                for r in rows {
                    if r.sample_time_s.is_finite() {
                        by_trial.insert(r.trial, r.sample_time_s);
                    }
                }
            }
        }

        groups
            .into_iter()
            .map(|((model, n, s, method), rows)| {
                let finite = |f: fn(&ReportRow) -> f64| -> Vec<f64> {
                    rows.iter().map(|r| f(r)).filter(|v| v.is_finite()).collect()
                };
                let sample_times = finite(|r| r.sample_time_s);
                let overhead = match wrs_times.get(&(model.clone(), n, s)) {
                    Some(wrs_by_trial) => {
                        let mut mine = 0.0;
                        let mut base = 0.0;
                        let mut count = 0usize;
                        for r in &rows {
                            if !r.sample_time_s.is_finite() {
                                continue;
                            }
                            if let Some(&w) = wrs_by_trial.get(&r.trial) {
                                mine += r.sample_time_s;
                                base += w;
                                count += 1;
                            }
                        }
                        if count > 0 && base > 0.0 {
                            mine / base
                        } else {
                            f64::NAN
                        }
                    }
                    None => f64::NAN,
                };
                AggregateRow {
                    n_rows: rows.len(),
                    mean_snr_db: mean(&finite(|r| r.snr_db)),
                    mean_sample_time_s: mean(&sample_times),
                    median_sample_time_s: median(&sample_times),
                    mean_recon_time_s: mean(&finite(|r| r.recon_time_s)),
                    overhead_vs_wrs: overhead,
                    model,
                    n,
                    s,
                    method,
                }
            })
            .collect()
    }

    /// Writes the aggregate CSV for the given provenance scope.
    pub fn write_aggregates_csv<W: Write>(&self, out: W, include_external: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "model",
            "n",
            "s",
            "method",
            "n_rows",
            "mean_snr_db",
            "mean_sample_time_s",
            "median_sample_time_s",
            "mean_recon_time_s",
            "overhead_vs_wrs",
        ])?;
        for a in self.aggregates(include_external) {
            w.write_record([
                a.model.as_str(),
                &a.n.to_string(),
                &a.s.to_string(),
                a.method.as_str(),
                &a.n_rows.to_string(),
                &a.mean_snr_db.to_string(),
                &a.mean_sample_time_s.to_string(),
                &a.median_sample_time_s.to_string(),
                &a.mean_recon_time_s.to_string(),
                &a.overhead_vs_wrs.to_string(),
            ])?;
        }
        w.flush().map_err(HarnessError::Io)?;
        Ok(())
    }

    /// Writes `<prefix>_report.csv`, `<prefix>_aggregates.csv`, and
    /// `<prefix>_run.log` under `dir`, creating it if needed. Returns the
    /// paths written.
    pub fn write_outputs(&self, dir: &Path, prefix: &str) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let report_path = dir.join(format!("{prefix}_report.csv"));
        let agg_path = dir.join(format!("{prefix}_aggregates.csv"));
        let log_path = dir.join(format!("{prefix}_run.log"));
        self.write_csv(std::fs::File::create(&report_path)?)?;
        self.write_aggregates_csv(std::fs::File::create(&agg_path)?, true)?;
        let mut log = std::fs::File::create(&log_path)?;
        for line in &self.logs {
            writeln!(log, "{line}")?;
        }
        Ok(vec![report_path, agg_path, log_path])
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Reads report rows from a third-party CSV and tags them `external`.
///
/// The header must list the eight report columns in order (a trailing
/// `source` column is tolerated and ignored). Any malformed data row fails
/// with its 1-based data-row number. An empty file yields zero rows.
pub fn ingest_external_baseline(path: &Path) -> Result<Vec<ReportRow>> {
    let text = std::fs::read_to_string(path)?;
    ingest_external_from_str(&text)
}

/// String-input core of [`ingest_external_baseline`].
pub fn ingest_external_from_str(text: &str) -> Result<Vec<ReportRow>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let headers = reader.headers().map_err(|e| HarnessError::Schema {
        line: 1,
        message: format!("unreadable header: {e}"),
    })?;
    let names: Vec<&str> = headers.iter().map(str::trim).collect();
    let expected: Vec<&str> = REPORT_COLUMNS.to_vec();
    let core_ok = names.len() >= expected.len() && names[..expected.len()] == expected[..];
    let tail_ok = match names.len() {
        8 => true,
        9 => names[8] == "source",
        _ => false,
    };
    if !(core_ok && tail_ok) {
        return Err(HarnessError::Schema {
            line: 1,
            message: format!(
                "header must be {:?} with an optional trailing \"source\", got {:?}",
                expected.join(","),
                names.join(",")
            ),
        });
    }

    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 1; // 1-based data row, header excluded
        let record = record.map_err(|e| HarnessError::Schema {
            line: row_no,
            message: format!("unreadable row: {e}"),
        })?;
        let fields: Vec<&str> = record.iter().map(str::trim).collect();
        if fields.len() < 8 || fields.len() > 9 {
            return Err(HarnessError::Schema {
                line: row_no,
                message: format!("expected 8 or 9 fields, found {}", fields.len()),
            });
        }
        let parse_usize = |col: usize, name: &str| -> Result<usize> {
            fields[col].parse::<usize>().map_err(|e| HarnessError::Schema {
                line: row_no,
                message: format!("bad {name} {:?}: {e}", fields[col]),
            })
        };
        let parse_f64 = |col: usize, name: &str| -> Result<f64> {
            fields[col].parse::<f64>().map_err(|e| HarnessError::Schema {
                line: row_no,
                message: format!("bad {name} {:?}: {e}", fields[col]),
            })
        };
        rows.push(ReportRow {
            model: fields[0].to_string(),
            n: parse_usize(1, "n")?,
            s: parse_usize(2, "s")?,
            method: fields[3].to_string(),
            trial: parse_usize(4, "trial")?,
            snr_db: parse_f64(5, "snr_db")?,
            sample_time_s: parse_f64(6, "sample_time_s")?,
            recon_time_s: parse_f64(7, "recon_time_s")?,
            source: "external".to_string(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: &str, trial: usize, snr: f64, t: f64) -> ReportRow {
        ReportRow {
            model: "sensor_knn".into(),
            n: 100,
            s: 20,
            method: method.into(),
            trial,
            snr_db: snr,
            sample_time_s: t,
            recon_time_s: 0.001,
            source: "run".into(),
        }
    }

    #[test]
    fn csv_roundtrip_preserves_values_and_tags_external() {
        let report = ExperimentReport {
            rows: vec![
                row("wrs", 0, 12.5, 0.25),
                row("avm", 0, f64::NAN, f64::INFINITY),
                row("avm", 1, 1e-300, 3.000000000000001),
            ],
            logs: vec![],
        };
        let text = report.to_csv_string();
        let back = ingest_external_from_str(&text).unwrap();
        assert_eq!(back.len(), 3);
        for (orig, got) in report.rows.iter().zip(&back) {
            assert_eq!(got.source, "external");
            assert_eq!(got.model, orig.model);
            assert_eq!(got.trial, orig.trial);
            assert!(got.snr_db == orig.snr_db || (got.snr_db.is_nan() && orig.snr_db.is_nan()));
            assert_eq!(got.sample_time_s, orig.sample_time_s);
        }
    }

    #[test]
    fn empty_input_yields_zero_rows() {
        assert!(ingest_external_from_str("").unwrap().is_empty());
        assert!(ingest_external_from_str("  \n ").unwrap().is_empty());
        let header_only = "model,n,s,method,trial,snr_db,sample_time_s,recon_time_s\n";
        assert!(ingest_external_from_str(header_only).unwrap().is_empty());
    }

    #[test]
    fn malformed_row_errors_name_the_row() {
        let mut text =
            String::from("model,n,s,method,trial,snr_db,sample_time_s,recon_time_s\n");
        for t in 0..6 {
            text.push_str(&format!("m,10,5,wrs,{t},1.0,0.1,0.1\n"));
        }
        text.push_str("m,10,five,wrs,6,1.0,0.1,0.1\n"); // data row 7, bad s
        let err = ingest_external_from_str(&text).unwrap_err();
        match err {
            HarnessError::Schema { line, ref message } => {
                assert_eq!(line, 7);
                assert!(message.contains("five"), "{message}");
            }
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn wrong_header_is_a_line_one_schema_error() {
        let err = ingest_external_from_str("model,n,s\nm,1,2\n").unwrap_err();
        match err {
            HarnessError::Schema { line, .. } => assert_eq!(line, 1),
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn overhead_uses_only_common_trials() {
        // wrs has trials {0,1}, avm has {1,2}; the ratio must use trial 1 only.
        let report = ExperimentReport {
            rows: vec![
                row("wrs", 0, 10.0, 0.1),
                row("wrs", 1, 10.0, 0.2),
                row("avm", 1, 12.0, 0.6),
                row("avm", 2, 12.0, 100.0),
            ],
            logs: vec![],
        };
        let aggs = report.aggregates(true);
        let avm = aggs.iter().find(|a| a.method == "avm").unwrap();
        assert!((avm.overhead_vs_wrs - 3.0).abs() < 1e-12, "{}", avm.overhead_vs_wrs);
        let wrs = aggs.iter().find(|a| a.method == "wrs").unwrap();
        assert!((wrs.overhead_vs_wrs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_method_report_has_only_the_wrs_baseline_ratio() {
        let report = ExperimentReport {
            rows: vec![row("wrs", 0, 10.0, 0.1), row("wrs", 1, 11.0, 0.3)],
            logs: vec![],
        };
        let aggs = report.aggregates(true);
        assert_eq!(aggs.len(), 1);
        assert_eq!(aggs[0].method, "wrs");
        assert!((aggs[0].overhead_vs_wrs - 1.0).abs() < 1e-12);
        assert!((aggs[0].median_sample_time_s - 0.2).abs() < 1e-12);
    }

    #[test]
    fn aggregates_skip_non_finite_metrics_but_count_rows() {
        let report = ExperimentReport {
            rows: vec![row("avm", 0, 10.0, 0.1), row("avm", 1, f64::NAN, f64::NAN)],
            logs: vec![],
        };
        let aggs = report.aggregates(true);
        assert_eq!(aggs[0].n_rows, 2);
        assert!((aggs[0].mean_snr_db - 10.0).abs() < 1e-12);
        assert!((aggs[0].mean_sample_time_s - 0.1).abs() < 1e-12);
    }

    #[test]
    fn external_rows_toggle_with_the_flag() {
        let mut report = ExperimentReport {
            rows: vec![row("avm", 0, 10.0, 0.1)],
            logs: vec![],
        };
        let mut ext = row("lsss", 0, 11.0, 0.2);
        ext.source = "external".into();
        report.merge(vec![ext]);
        assert_eq!(report.aggregates(false).len(), 1);
        assert_eq!(report.aggregates(true).len(), 2);
    }

    #[test]
    fn median_averages_the_middle_pair() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
