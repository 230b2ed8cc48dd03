//! Plain-text graph files.
//!
//! An edge file has one edge per line, two whitespace-separated vertex ids.
//! A label file has one `id label` pair per line. Ids are arbitrary tokens;
//! they are densified to `0..n` in label-file order. Blank lines and lines
//! starting with `#` are skipped in both.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::{CommunityPartition, Graph, LabeledGraph, Permutation};

/// A graph read from disk together with its original vertex ids.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: LabeledGraph,
    /// Dense index → id token from the files.
    pub ids: Vec<String>,
    pub self_loops_dropped: usize,
}

impl LoadedGraph {
    pub fn index_of(&self) -> HashMap<&str, usize> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect()
    }
}

fn content_lines(path: &Path) -> Result<impl Iterator<Item = Result<(usize, String)>>> {
    let reader = BufReader::new(File::open(path)?);
    Ok(reader
        .lines()
        .enumerate()
        .map(|(i, line)| line.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|r| match r {
            Ok((_, l)) => {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        }))
}

fn two_fields(line: &str, lineno: usize, what: &str) -> Result<(String, String)> {
    let mut it = line.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a.to_string(), b.to_string())),
        _ => Err(Error::Parse {
            line: lineno,
            message: format!("expected two whitespace-separated fields ({what}), got {line:?}"),
        }),
    }
}

fn read_labels(path: &Path) -> Result<(Vec<String>, Vec<String>)> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut seen = HashMap::new();
    for item in content_lines(path)? {
        let (lineno, line) = item?;
        let (id, label) = two_fields(&line, lineno, "id label")?;
        if let Some(first) = seen.insert(id.clone(), lineno) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("vertex {id} already labeled on line {first}"),
            });
        }
        ids.push(id);
        labels.push(label);
    }
    Ok((ids, labels))
}

/// Reads an edge file and a label file.
///
/// Duplicate edges collapse, self-loops are dropped (and counted), and an
/// edge endpoint without a label is a validation error.
pub fn load_graph(edge_path: &Path, label_path: &Path) -> Result<LoadedGraph> {
    let (ids, labels) = read_labels(label_path)?;
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut edges = Vec::new();
    let mut self_loops = 0;
    for item in content_lines(edge_path)? {
        let (lineno, line) = item?;
        let (a, b) = two_fields(&line, lineno, "edge")?;
        let lookup = |id: &str| {
            index.get(id).copied().ok_or_else(|| {
                Error::Validation(format!(
                    "vertex {id} on line {lineno} of {} has no label",
                    edge_path.display()
                ))
            })
        };
        let (u, v) = (lookup(&a)?, lookup(&b)?);
        if u == v {
            self_loops += 1;
        } else {
            edges.push((u, v));
        }
    }
    if self_loops > 0 {
        warn!("{}: dropped {self_loops} self-loops", edge_path.display());
    }
    let graph = Graph::from_edges(ids.len(), edges)?;
    let partition = CommunityPartition::from_labels(&labels);
    Ok(LoadedGraph {
        graph: LabeledGraph::new(graph, partition)?,
        ids,
        self_loops_dropped: self_loops,
    })
}

/// Writes `lg` in the formats read by [`load_graph`]. Vertex `v` is written
/// as `ids[v]` when ids are given, otherwise as its index.
pub fn save_graph(
    lg: &LabeledGraph,
    ids: Option<&[String]>,
    edge_path: &Path,
    label_path: &Path,
) -> Result<()> {
    if let Some(ids) = ids {
        if ids.len() != lg.n() {
            return Err(Error::arg("one id per vertex required"));
        }
    }
    let name = |v: usize| match ids {
        Some(ids) => ids[v].clone(),
        None => v.to_string(),
    };
    let mut out = BufWriter::new(File::create(label_path)?);
    for v in 0..lg.n() {
        let label = lg.partition.original_label(lg.partition.label(v));
        writeln!(out, "{} {}", name(v), label)?;
    }
    out.flush()?;
    let mut out = BufWriter::new(File::create(edge_path)?);
    for (u, v) in lg.graph.edges() {
        writeln!(out, "{} {}", name(u), name(v))?;
    }
    out.flush()?;
    Ok(())
}

/// Two graphs over the same vertex ids, with the alignment implied by them.
#[derive(Debug, Clone)]
pub struct LoadedPair {
    pub first: LoadedGraph,
    pub second: LoadedGraph,
    /// Vertex `v` of `second` carries the same id as `truth.apply(v)` in `first`.
    pub truth: Permutation,
}

/// Loads two graphs that share their vertex ids.
pub fn load_pair(edges: &Path, labels: &Path, edges2: &Path, labels2: &Path) -> Result<LoadedPair> {
    let first = load_graph(edges, labels)?;
    let second = load_graph(edges2, labels2)?;
    if first.ids.len() != second.ids.len() {
        return Err(Error::Validation(format!(
            "graphs have {} and {} labeled vertices",
            first.ids.len(),
            second.ids.len()
        )));
    }
    let index = first.index_of();
    let forward = second
        .ids
        .iter()
        .map(|id| {
            index.get(id.as_str()).copied().ok_or_else(|| {
                Error::Validation(format!(
                    "vertex {id} of the second graph is missing from the first"
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let truth = Permutation::from_forward(forward)?;
    for (v, &u) in truth.forward().iter().enumerate() {
        let (a, b) = (
            first
                .graph
                .partition
                .original_label(first.graph.partition.label(u)),
            second
                .graph
                .partition
                .original_label(second.graph.partition.label(v)),
        );
        if a != b {
            return Err(Error::Validation(format!(
                "vertex {} is labeled {a} in the first graph and {b} in the second",
                second.ids[v]
            )));
        }
    }
    first
        .graph
        .partition
        .check_compatible(&second.graph.partition)
        .map_err(|e| Error::Validation(e.to_string()))?;
    Ok(LoadedPair {
        first,
        second,
        truth,
    })
}
