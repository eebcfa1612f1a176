//! Plain-text graph and point-cloud serialization.
//!
//! Edge-list format: a header line `n m`, then exactly `m` lines `i j w`
//! (0-based endpoints, one line per undirected edge). Point clouds are
//! headerless CSV, one row per point, optionally ending in an integer label
//! column.

use super::{GraphBuilder, SparseGraph};
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

/// Writes the `n m` header plus one `i j w` line per undirected edge,
/// ordered by (i, j). Floats use shortest round-trip formatting, so the
/// output is byte-stable.
pub fn write_edge_list<W: Write>(g: &SparseGraph, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", g.n(), g.edge_count())?;
    for (i, j, w) in g.undirected_edges() {
        writeln!(out, "{i} {j} {w}")?;
    }
    Ok(())
}

/// Parses the edge-list format. Errors carry 1-based line numbers; duplicate
/// edges are rejected rather than silently merged.
pub fn read_edge_list<R: BufRead>(input: R) -> Result<SparseGraph> {
    let mut lines = input.lines().enumerate();
    let (n, m) = match lines.next() {
        Some((_, line)) => {
            let line = line?;
            let mut tok = line.split_whitespace();
            let parse = |t: Option<&str>, what: &str| -> Result<usize> {
                t.ok_or_else(|| Error::Parse {
                    line: 1,
                    message: format!("missing {what} in header"),
                })?
                .parse::<usize>()
                .map_err(|e| Error::Parse {
                    line: 1,
                    message: format!("bad {what}: {e}"),
                })
            };
            let n = parse(tok.next(), "vertex count")?;
            let m = parse(tok.next(), "edge count")?;
            if tok.next().is_some() {
                return Err(Error::Parse {
                    line: 1,
                    message: "trailing tokens in header".into(),
                });
            }
            (n, m)
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty file".into(),
            })
        }
    };
    let mut builder = GraphBuilder::new(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut count = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let i: usize = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: lineno,
                message: "bad source vertex".into(),
            })?;
        let j: usize = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: lineno,
                message: "bad target vertex".into(),
            })?;
        let w: f64 = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: lineno,
                message: "bad edge weight".into(),
            })?;
        if tok.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "trailing tokens".into(),
            });
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate edge ({i}, {j})"),
            });
        }
        builder.add_edge(i, j, w).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        count += 1;
    }
    if count != m {
        return Err(Error::Parse {
            line: count + 1,
            message: format!("header promised {m} edges, found {count}"),
        });
    }
    Ok(builder.build())
}

/// Whether the final CSV column holds integer class labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    None,
    Last,
}

/// Reads a headerless CSV point cloud. With [`LabelColumn::Last`] the final
/// column must parse as a non-negative integer label on every row.
pub fn read_points_csv<R: BufRead>(
    input: R,
    labels: LabelColumn,
) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let mut points = Vec::new();
    let mut classes = Vec::new();
    let mut width = None;
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let need_label = labels == LabelColumn::Last;
        let coord_count = fields.len() - usize::from(need_label);
        if coord_count == 0 {
            return Err(Error::Parse {
                line: lineno,
                message: "row has no coordinate columns".into(),
            });
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected {w} columns, found {}", fields.len()),
                })
            }
            _ => {}
        }
        let mut coords = Vec::with_capacity(coord_count);
        for f in &fields[..coord_count] {
            coords.push(f.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad coordinate {f:?}: {e}"),
            })?);
        }
        if need_label {
            classes.push(fields[coord_count].parse::<usize>().map_err(|e| {
                Error::Parse {
                    line: lineno,
                    message: format!("bad label {:?}: {e}", fields[coord_count]),
                }
            })?);
        }
        points.push(coords);
    }
    Ok((points, classes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_sensor_knn;

    #[test]
    fn edge_list_round_trip() {
        let g = gen_sensor_knn(30, 3, 5).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_parse_errors_name_lines() {
        let bad = "3 2\n0 1 1.0\n0 0 1.0\n";
        match read_edge_list(bad.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let dup = "3 2\n0 1 1.0\n1 0 2.0\n";
        match read_edge_list(dup.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected duplicate-edge error, got {other:?}"),
        }
        let short = "3 5\n0 1 1.0\n";
        assert!(read_edge_list(short.as_bytes()).is_err());
    }

    #[test]
    fn points_csv_with_labels() {
        let csv = "0.0,1.0,0\n2.5,3.5,1\n";
        let (pts, labels) = read_points_csv(csv.as_bytes(), LabelColumn::Last).unwrap();
        assert_eq!(pts, vec![vec![0.0, 1.0], vec![2.5, 3.5]]);
        assert_eq!(labels, vec![0, 1]);
        let (pts, labels) = read_points_csv(csv.as_bytes(), LabelColumn::None).unwrap();
        assert_eq!(pts[0], vec![0.0, 1.0, 0.0]);
        assert!(labels.is_empty());
    }

    #[test]
    fn points_csv_rejects_ragged_rows() {
        let csv = "0.0,1.0\n2.5\n";
        match read_points_csv(csv.as_bytes(), LabelColumn::None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
