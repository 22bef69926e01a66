//! Text formats: a `# {json}` header line, then one edge per line.
//!
//! Graphs list `u v` pairs (0-based, `u < v`, sorted). Hypergraphs list the
//! vertices of one hyperedge per line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{Graph, LinearHypergraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphHeader {
    pub family: String,
    pub params: BTreeMap<String, Value>,
    pub n: usize,
    pub edges: usize,
    pub degree_profile: BTreeMap<usize, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absolute_points: Option<Vec<usize>>,
}

impl GraphHeader {
    pub fn new(family: &str, params: BTreeMap<String, Value>, g: &Graph) -> Self {
        GraphHeader {
            family: family.to_string(),
            params,
            n: g.n(),
            edges: g.edge_count(),
            degree_profile: g.degree_profile(),
            absolute_points: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HypergraphHeader {
    pub family: String,
    pub params: BTreeMap<String, Value>,
    pub n: usize,
    pub edges: usize,
    pub uniformity: usize,
    #[serde(default)]
    pub degree: Option<usize>,
}

impl HypergraphHeader {
    pub fn new(family: &str, params: BTreeMap<String, Value>, h: &LinearHypergraph) -> Self {
        HypergraphHeader {
            family: family.to_string(),
            params,
            n: h.n(),
            edges: h.edge_count(),
            uniformity: h.uniformity(),
            degree: h.regular_degree(),
        }
    }
}

pub fn write_graph(header: &GraphHeader, g: &Graph) -> String {
    let mut out = format!("# {}\n", serde_json::to_string(header).expect("header serializes"));
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

fn split_header(text: &str) -> (Option<&str>, impl Iterator<Item = (usize, &str)>) {
    let mut header = None;
    let mut lines = text.lines().enumerate().peekable();
    if let Some((_, first)) = lines.peek() {
        if let Some(rest) = first.trim_start().strip_prefix('#') {
            if rest.trim_start().starts_with('{') {
                header = Some(rest.trim());
                lines.next();
            }
        }
    }
    let body = lines.filter(|(_, l)| {
        let l = l.trim();
        !l.is_empty() && !l.starts_with('#')
    });
    (header, body)
}

fn parse_indices(line_no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| tok.parse::<usize>().map_err(|_| Error::Parse(format!("line {}: bad vertex '{tok}'", line_no + 1))))
        .collect()
}

/// Parses a graph. Without a header, `n` is one more than the largest index.
pub fn read_graph(text: &str) -> Result<(Option<GraphHeader>, Graph)> {
    let (header_text, body) = split_header(text);
    let header: Option<GraphHeader> = header_text.map(serde_json::from_str).transpose()?;
    let mut edges = Vec::new();
    for (no, line) in body {
        match parse_indices(no, line)?.as_slice() {
            &[u, v] => edges.push((u, v)),
            _ => return Err(Error::Parse(format!("line {}: expected two vertices", no + 1))),
        }
    }
    let n = match &header {
        Some(h) => h.n,
        None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
    };
    let g = Graph::from_edges(n, edges)?;
    if let Some(h) = &header {
        if h.edges != g.edge_count() {
            return Err(Error::Parse(format!("header declares {} edges, body has {}", h.edges, g.edge_count())));
        }
    }
    Ok((header, g))
}

pub fn write_hypergraph(header: &HypergraphHeader, h: &LinearHypergraph) -> String {
    let mut out = format!("# {}\n", serde_json::to_string(header).expect("header serializes"));
    for e in h.edges() {
        let line: Vec<String> = e.iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_hypergraph(text: &str) -> Result<(Option<HypergraphHeader>, LinearHypergraph)> {
    let (header_text, body) = split_header(text);
    let header: Option<HypergraphHeader> = header_text.map(serde_json::from_str).transpose()?;
    let edges = body.map(|(no, l)| parse_indices(no, l)).collect::<Result<Vec<_>>>()?;
    let n = match &header {
        Some(h) => h.n,
        None => edges.iter().flatten().map(|&v| v + 1).max().unwrap_or(0),
    };
    Ok((header, LinearHypergraph::new(n, edges)?))
}
