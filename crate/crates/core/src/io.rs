//! SteinLib `.stp` and PACE `.gr` readers, plus solution and instance writers.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Cost, GraphError, Instance, Network, NetworkBuilder, SteinerTree, VertexId};

const STP_MAGIC: &str = "33D32945";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Stp,
    Gr,
}

impl Format {
    /// Guesses from the content: the SteinLib magic number means `.stp`.
    pub fn detect(text: &str) -> Format {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
        if first.to_ascii_uppercase().starts_with(STP_MAGIC) {
            Format::Stp
        } else {
            Format::Gr
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing STP header line")]
    MissingHeader,
    #[error("{what}: declared {declared}, found {found}")]
    CountMismatch { what: &'static str, declared: usize, found: usize },
    #[error("line {line}: edge weight must be a positive integer")]
    NonPositiveWeight { line: usize },
    #[error("line {line}: vertex {vertex} is out of range")]
    VertexOutOfRange { line: usize, vertex: u64 },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("section {0} is not closed by END")]
    Truncated(String),
    #[error("missing section {0}")]
    MissingSection(&'static str),
    #[error("terminals lie in different components")]
    Disconnected,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A parsed instance restricted to the component holding its terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedInstance {
    pub instance: Instance,
    /// Original 1-based label of each internal vertex.
    pub labels: Vec<u64>,
    pub format: Format,
    /// Root declared in the file, as an internal id.
    pub root: Option<VertexId>,
    /// Vertices dropped because they cannot reach the terminals.
    pub dropped_vertices: usize,
}

impl ParsedInstance {
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v]
    }

    pub fn vertex(&self, label: u64) -> Option<VertexId> {
        self.labels.binary_search(&label).ok()
    }
}

pub fn parse_stp(text: &str) -> Result<ParsedInstance, ParseError> {
    parse(text, Format::Stp)
}

pub fn parse_gr(text: &str) -> Result<ParsedInstance, ParseError> {
    parse(text, Format::Gr)
}

/// Parses with the format guessed by [`Format::detect`].
pub fn parse_any(text: &str) -> Result<ParsedInstance, ParseError> {
    parse(text, Format::detect(text))
}

#[derive(Default)]
struct Raw {
    nodes: Option<usize>,
    edges_declared: Option<usize>,
    edges: Vec<(u64, u64, Cost, usize)>,
    terminals_declared: Option<usize>,
    terminals: Vec<(u64, usize)>,
    root: Option<(u64, usize)>,
    seen_graph: bool,
    seen_terminals: bool,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn number(tok: Option<&str>, line: usize) -> Result<u64, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing number"))?;
    tok.parse().map_err(|_| syntax(line, format!("bad number {tok:?}")))
}

fn weight(tok: Option<&str>, line: usize) -> Result<Cost, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing weight"))?;
    if tok.starts_with('-') {
        return Err(ParseError::NonPositiveWeight { line });
    }
    match tok.parse::<Cost>() {
        Ok(0) => Err(ParseError::NonPositiveWeight { line }),
        Ok(w) => Ok(w),
        Err(_) => Err(syntax(line, format!("bad weight {tok:?}"))),
    }
}

fn parse(text: &str, format: Format) -> Result<ParsedInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#') && !l.starts_with("c ") && *l != "c");

    if format == Format::Stp {
        match lines.next() {
            Some((_, l)) if l.to_ascii_uppercase().starts_with(STP_MAGIC) => {}
            _ => return Err(ParseError::MissingHeader),
        }
    }

    let mut raw = Raw::default();
    let mut section: Option<String> = None;
    for (no, line) in lines {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap().to_ascii_lowercase();
        let Some(current) = section.clone() else {
            match key.as_str() {
                "section" => {
                    let name = toks.next().ok_or_else(|| syntax(no, "section without name"))?;
                    section = Some(name.to_ascii_lowercase());
                }
                "eof" => break,
                _ => return Err(syntax(no, format!("unexpected {line:?} outside a section"))),
            }
            continue;
        };
        if key == "end" {
            section = None;
            continue;
        }
        if key == "section" || key == "eof" {
            return Err(ParseError::Truncated(current));
        }
        match current.as_str() {
            "graph" => {
                raw.seen_graph = true;
                match key.as_str() {
                    "nodes" => raw.nodes = Some(number(toks.next(), no)? as usize),
                    "edges" => raw.edges_declared = Some(number(toks.next(), no)? as usize),
                    "e" => {
                        let u = number(toks.next(), no)?;
                        let v = number(toks.next(), no)?;
                        let w = weight(toks.next(), no)?;
                        raw.edges.push((u, v, w, no));
                    }
                    _ => return Err(syntax(no, format!("unknown graph entry {line:?}"))),
                }
            }
            "terminals" => {
                raw.seen_terminals = true;
                match key.as_str() {
                    "terminals" => raw.terminals_declared = Some(number(toks.next(), no)? as usize),
                    "t" => raw.terminals.push((number(toks.next(), no)?, no)),
                    "root" => raw.root = Some((number(toks.next(), no)?, no)),
                    _ => return Err(syntax(no, format!("unknown terminal entry {line:?}"))),
                }
            }
            // comments, coordinates and anything else we do not use
            _ => {}
        }
    }
    if let Some(open) = section {
        return Err(ParseError::Truncated(open));
    }
    build(raw, format)
}

fn build(raw: Raw, format: Format) -> Result<ParsedInstance, ParseError> {
    if !raw.seen_graph {
        return Err(ParseError::MissingSection("Graph"));
    }
    if !raw.seen_terminals {
        return Err(ParseError::MissingSection("Terminals"));
    }
    let n = raw.nodes.ok_or_else(|| syntax(0, "missing Nodes"))?;
    if let Some(m) = raw.edges_declared {
        if m != raw.edges.len() {
            return Err(ParseError::CountMismatch {
                what: "edges",
                declared: m,
                found: raw.edges.len(),
            });
        }
    }
    if let Some(k) = raw.terminals_declared {
        if k != raw.terminals.len() {
            return Err(ParseError::CountMismatch {
                what: "terminals",
                declared: k,
                found: raw.terminals.len(),
            });
        }
    }
    let check = |label: u64, line: usize| -> Result<VertexId, ParseError> {
        if label == 0 || label > n as u64 {
            Err(ParseError::VertexOutOfRange { line, vertex: label })
        } else {
            Ok(label as usize - 1)
        }
    };

    let mut builder = NetworkBuilder::new(n);
    for &(u, v, w, line) in &raw.edges {
        let (u, v) = (check(u, line)?, check(v, line)?);
        if u != v {
            builder.add_edge(u, v, w)?;
        }
    }
    let full = builder.build()?;
    let mut terminals = Vec::with_capacity(raw.terminals.len());
    for &(t, line) in &raw.terminals {
        terminals.push(check(t, line)?);
    }
    if terminals.is_empty() {
        return Err(GraphError::NoTerminals.into());
    }
    let root = raw.root.map(|(r, line)| check(r, line)).transpose()?;

    // keep only the component of the terminals
    let mut component = full.component_of(terminals[0]);
    component.sort_unstable();
    let mut index = vec![None; n];
    for (i, &v) in component.iter().enumerate() {
        index[v] = Some(i);
    }
    if terminals.iter().any(|&t| index[t].is_none()) {
        return Err(ParseError::Disconnected);
    }
    let edges = full
        .edges()
        .iter()
        .filter_map(|e| Some((index[e.u]?, index[e.v]?, e.cost)));
    let network = Network::from_edges(component.len(), edges)?;
    let mut instance = Instance::new(network, terminals.iter().map(|&t| index[t].unwrap()))?;
    let root = match root.and_then(|r| index[r]) {
        Some(r) if instance.is_terminal(r) => {
            instance = instance.with_root(r)?;
            Some(r)
        }
        _ => None,
    };
    Ok(ParsedInstance {
        instance,
        labels: component.iter().map(|&v| v as u64 + 1).collect(),
        format,
        root,
        dropped_vertices: n - component.len(),
    })
}

/// PACE solution text: `VALUE <cost>` and one `u v` line per edge, labels
/// ascending.
pub fn write_solution(network: &Network, tree: &SteinerTree, labels: &[u64]) -> String {
    let mut pairs: Vec<(u64, u64)> = tree
        .edges()
        .iter()
        .map(|&e| {
            let e = network.edge(e);
            let (a, b) = (labels[e.u], labels[e.v]);
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    let mut out = format!("VALUE {}\n", network.cost_of(tree.edges()));
    for (a, b) in pairs {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}

/// Serializes an instance; vertex `v` is written as `labels[v]` when given,
/// else as `v + 1`. Labels must stay within `1..=vertex count`.
pub fn write_instance(instance: &Instance, labels: Option<&[u64]>, format: Format) -> String {
    let network = instance.network();
    let name = |v: VertexId| labels.map_or(v as u64 + 1, |l| l[v]);
    let nodes = labels
        .and_then(|l| l.iter().copied().max())
        .map_or(network.vertex_count() as u64, |m| m.max(network.vertex_count() as u64));
    let mut out = String::new();
    if format == Format::Stp {
        out.push_str("33D32945 STP File, STP Format Version 1.0\n\n");
    }
    let _ = writeln!(out, "SECTION Graph\nNodes {nodes}\nEdges {}", network.edge_count());
    for e in network.edges() {
        let _ = writeln!(out, "E {} {} {}", name(e.u), name(e.v), e.cost);
    }
    let _ = writeln!(out, "END\n\nSECTION Terminals\nTerminals {}", instance.terminals().len());
    for &t in instance.terminals() {
        let _ = writeln!(out, "T {}", name(t));
    }
    out.push_str("END\n\nEOF\n");
    out
}
