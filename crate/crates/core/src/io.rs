//! Text formats for graphs and labels.
//!
//! * Edge list: one edge per line, two whitespace-separated integer ids.
//!   Blank lines and lines starting with `#` are ignored.
//! * Labels: CSV with header `node_id,label`; an empty label means missing.
//! * Dense matrix: one row of `0`/`1` entries per node (whitespace or comma
//!   separated), row index is the node id.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{load_graph, LabeledGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeFormat {
    #[default]
    EdgeList,
    Matrix,
}

impl std::str::FromStr for EdgeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "edge-list" => Ok(Self::EdgeList),
            "matrix" => Ok(Self::Matrix),
            other => Err(Error::Argument(format!("unknown edge format {other:?}"))),
        }
    }
}

pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Vec<(u64, u64)>> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 2 node ids, found {} fields", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node id {s:?}"),
            })
        };
        edges.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok(edges)
}

/// Rows of 0/1 entries; every 1 at `(i, j)` becomes the edge `(i, j)`.
pub fn parse_dense_matrix<R: BufRead>(reader: R) -> Result<Vec<(u64, u64)>> {
    let mut edges = Vec::new();
    let mut width = None;
    let mut row = 0u64;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("row has {} entries, expected {w}", cells.len()),
                })
            }
            _ => {}
        }
        for (col, cell) in cells.iter().enumerate() {
            match *cell {
                "0" => {}
                "1" => edges.push((row, col as u64)),
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("matrix entry {other:?} is not 0 or 1"),
                    })
                }
            }
        }
        row += 1;
    }
    if let Some(w) = width {
        if w as u64 != row {
            return Err(Error::Structure(format!(
                "matrix is {row}x{w}, expected a square matrix"
            )));
        }
    }
    Ok(edges)
}

#[derive(Debug, Deserialize)]
struct LabelRecord {
    node_id: String,
    label: Option<String>,
}

pub fn parse_labels<R: Read>(reader: R) -> Result<Vec<(u64, Option<String>)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    if headers.len() != 2 || &headers[0] != "node_id" || &headers[1] != "label" {
        return Err(Error::Parse {
            line: 1,
            message: "label header must be `node_id,label`".into(),
        });
    }
    let mut labels = Vec::new();
    for (idx, record) in rdr.deserialize::<LabelRecord>().enumerate() {
        let lineno = idx + 2;
        let record = record.map_err(|e| csv_error(e, lineno))?;
        let id = record.node_id.parse::<u64>().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid node id {:?}", record.node_id),
        })?;
        labels.push((id, record.label.filter(|l| !l.is_empty())));
    }
    Ok(labels)
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Read and assemble a graph from an edge file and an optional label file.
pub fn read_graph(
    edges_path: &Path,
    labels_path: Option<&Path>,
    directed: bool,
    format: EdgeFormat,
) -> Result<LabeledGraph> {
    let with_path = |e: Error, path: &Path| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    };
    let reader = BufReader::new(File::open(edges_path)?);
    let edges = match format {
        EdgeFormat::EdgeList => parse_edge_list(reader),
        EdgeFormat::Matrix => parse_dense_matrix(reader),
    }
    .map_err(|e| with_path(e, edges_path))?;
    let labels = match labels_path {
        Some(p) => parse_labels(File::open(p)?).map_err(|e| with_path(e, p))?,
        None => Vec::new(),
    };
    load_graph(&edges, &labels, directed)
}

/// Write the graph as an edge list using source ids. Undirected edges are
/// written once.
pub fn write_edge_list<W: Write>(g: &LabeledGraph, mut w: W) -> Result<()> {
    for (u, v) in g.arcs() {
        writeln!(w, "{}\t{}", g.source_id(u), g.source_id(v))?;
    }
    Ok(())
}

pub fn write_labels<W: Write>(g: &LabeledGraph, mut w: W) -> Result<()> {
    writeln!(w, "node_id,label")?;
    for i in 0..g.node_count() {
        let label = g.label(i).map(|c| g.dict().name(c)).unwrap_or("");
        writeln!(w, "{},{}", g.source_id(i), label)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_skips_comments_and_blank_lines() {
        let text = "# header\n0 1\n\n1\t2\n  # indented comment\n";
        assert_eq!(parse_edge_list(text.as_bytes()).unwrap(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn edge_list_reports_line_numbers() {
        let err = parse_edge_list("0 1\n1 2 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_edge_list("0 1\n# c\nx 2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn labels_with_missing_values() {
        let text = "node_id,label\n0,F\n1,\n2,M\n";
        let labels = parse_labels(text.as_bytes()).unwrap();
        assert_eq!(
            labels,
            vec![(0, Some("F".into())), (1, None), (2, Some("M".into()))]
        );
    }

    #[test]
    fn labels_bad_header_and_bad_id() {
        assert!(parse_labels("id,label\n0,F\n".as_bytes()).is_err());
        let err = parse_labels("node_id,label\n0,F\nzz,M\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_labels("node_id,label\n0,F,extra\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn dense_matrix_rows() {
        let text = "0 1 0\n1 0 1\n0 1 0\n";
        let edges = parse_dense_matrix(text.as_bytes()).unwrap();
        assert_eq!(edges, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert!(parse_dense_matrix("0 1\n1 0 0\n".as_bytes()).is_err());
        assert!(parse_dense_matrix("0 2\n1 0\n".as_bytes()).is_err());
        assert!(parse_dense_matrix("0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn write_then_read_back() {
        let g = load_graph(
            &[(5, 9), (9, 12), (12, 5)],
            &[(5, Some("F".into())), (9, Some("M".into())), (12, None)],
            false,
        )
        .unwrap();
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        write_edge_list(&g, &mut edges).unwrap();
        write_labels(&g, &mut labels).unwrap();
        let back = load_graph(
            &parse_edge_list(edges.as_slice()).unwrap(),
            &parse_labels(labels.as_slice()).unwrap(),
            false,
        )
        .unwrap();
        assert_eq!(back, g);
    }
}
