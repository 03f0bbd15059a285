use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::ParseMode;
use crate::digits::FsdHistogram;
use crate::error::IngestError;

/// Which edge direction a node's count is taken from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    /// Outgoing edges: friends / following.
    #[default]
    Out,
    /// Incoming edges: followers.
    In,
}

/// Per-node degree counts from a directed edge list.
///
/// Only nonzero degrees are stored. A node is known to the table if it
/// appears on either side of at least one edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeTable {
    out_degree: HashMap<u64, u64>,
    in_degree: HashMap<u64, u64>,
    edges: u64,
    skipped_lines: u64,
}

impl DegreeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, src: u64, dst: u64) {
        *self.out_degree.entry(src).or_insert(0) += 1;
        *self.in_degree.entry(dst).or_insert(0) += 1;
        self.edges += 1;
    }

    pub fn out_degree(&self, node: u64) -> u64 {
        self.out_degree.get(&node).copied().unwrap_or(0)
    }

    pub fn in_degree(&self, node: u64) -> u64 {
        self.in_degree.get(&node).copied().unwrap_or(0)
    }

    pub fn degree(&self, node: u64, kind: DegreeKind) -> u64 {
        match kind {
            DegreeKind::Out => self.out_degree(node),
            DegreeKind::In => self.in_degree(node),
        }
    }

    pub fn contains(&self, node: u64) -> bool {
        self.out_degree.contains_key(&node) || self.in_degree.contains_key(&node)
    }

    pub fn out_degrees(&self) -> &HashMap<u64, u64> {
        &self.out_degree
    }

    pub fn in_degrees(&self) -> &HashMap<u64, u64> {
        &self.in_degree
    }

    /// Number of distinct node ids seen on either side of an edge.
    pub fn node_count(&self) -> usize {
        let only_in = self
            .in_degree
            .keys()
            .filter(|k| !self.out_degree.contains_key(k))
            .count();
        self.out_degree.len() + only_in
    }

    /// All known node ids in ascending order.
    pub fn nodes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .out_degree
            .keys()
            .chain(self.in_degree.keys().filter(|k| !self.out_degree.contains_key(k)))
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    /// Malformed lines dropped in skip mode.
    pub fn skipped_lines(&self) -> u64 {
        self.skipped_lines
    }

    /// Digit histogram over every known node's degree. Nodes with degree zero
    /// in the chosen direction land in `excluded_zero`.
    pub fn histogram(&self, kind: DegreeKind) -> FsdHistogram {
        let (present, other) = match kind {
            DegreeKind::Out => (&self.out_degree, &self.in_degree),
            DegreeKind::In => (&self.in_degree, &self.out_degree),
        };
        let mut h: FsdHistogram = present.values().copied().collect();
        let sinks = other.keys().filter(|k| !present.contains_key(k)).count();
        h.extend(std::iter::repeat(0).take(sinks));
        h
    }

    pub fn merge(&mut self, other: &DegreeTable) {
        for (&k, &v) in &other.out_degree {
            *self.out_degree.entry(k).or_insert(0) += v;
        }
        for (&k, &v) in &other.in_degree {
            *self.in_degree.entry(k).or_insert(0) += v;
        }
        self.edges += other.edges;
        self.skipped_lines += other.skipped_lines;
    }
}

/// Degree table plus out-adjacency, as needed for egocentric analysis.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    degrees: DegreeTable,
    adjacency: HashMap<u64, Vec<u64>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, src: u64, dst: u64) {
        self.degrees.add_edge(src, dst);
        self.adjacency.entry(src).or_default().push(dst);
    }

    pub fn degrees(&self) -> &DegreeTable {
        &self.degrees
    }

    /// Nodes `user` points to, in input order. Empty for unknown users and
    /// sinks.
    pub fn friends(&self, user: u64) -> &[u64] {
        self.adjacency.get(&user).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, node: u64) -> bool {
        self.degrees.contains(node)
    }
}

impl FromIterator<(u64, u64)> for Graph {
    fn from_iter<I: IntoIterator<Item = (u64, u64)>>(iter: I) -> Self {
        let mut g = Graph::new();
        for (s, d) in iter {
            g.add_edge(s, d);
        }
        g
    }
}

/// Parses one edge line. `Ok(None)` for comments and blank lines.
fn parse_line(line: &[u8]) -> Result<Option<(u64, u64)>, &'static str> {
    let line = strip_eol(line);
    let text = std::str::from_utf8(line).map_err(|_| "not valid UTF-8")?;
    let trimmed = text.trim_start();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut it = trimmed.split_ascii_whitespace();
    let src = it.next().ok_or("missing source id")?;
    let dst = it.next().ok_or("missing destination id")?;
    if it.next().is_some() {
        return Err("expected exactly two fields");
    }
    let src = src.parse::<u64>().map_err(|_| "source id is not a nonnegative integer")?;
    let dst = dst
        .parse::<u64>()
        .map_err(|_| "destination id is not a nonnegative integer")?;
    Ok(Some((src, dst)))
}

fn strip_eol(mut line: &[u8]) -> &[u8] {
    if let [rest @ .., b'\n'] = line {
        line = rest;
    }
    if let [rest @ .., b'\r'] = line {
        line = rest;
    }
    line
}

fn for_each_edge<R: BufRead>(
    mut source: R,
    mode: ParseMode,
    mut f: impl FnMut(u64, u64),
) -> Result<u64, IngestError> {
    let mut buf = Vec::with_capacity(64);
    let mut line_no = 0u64;
    let mut skipped = 0u64;
    loop {
        buf.clear();
        if source.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        match parse_line(&buf) {
            Ok(Some((s, d))) => f(s, d),
            Ok(None) => {}
            Err(reason) => match mode {
                ParseMode::Strict => {
                    return Err(IngestError::MalformedEdge {
                        line: line_no,
                        text: String::from_utf8_lossy(strip_eol(&buf)).into_owned(),
                        reason,
                    })
                }
                ParseMode::Skip => skipped += 1,
            },
        }
    }
    Ok(skipped)
}

/// Single pass over a `src dst` edge list, counting out- and in-degrees.
///
/// Lines starting with `#` and blank lines are ignored. Self-loops and
/// duplicate edges are counted as given.
pub fn parse_edge_list<R: BufRead>(source: R, mode: ParseMode) -> Result<DegreeTable, IngestError> {
    let mut table = DegreeTable::new();
    let skipped = for_each_edge(source, mode, |s, d| table.add_edge(s, d))?;
    table.skipped_lines = skipped;
    Ok(table)
}

/// Like [`parse_edge_list`], also keeping each node's outgoing adjacency.
pub fn parse_graph<R: BufRead>(source: R, mode: ParseMode) -> Result<Graph, IngestError> {
    let mut graph = Graph::new();
    let skipped = for_each_edge(source, mode, |s, d| graph.add_edge(s, d))?;
    graph.degrees.skipped_lines = skipped;
    Ok(graph)
}
