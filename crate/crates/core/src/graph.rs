//! Immutable simple undirected graphs and the edge-list text format.
//!
//! Adjacency lists are stored in CSR form. The order of every list is the
//! order in which edges were supplied and is never sorted afterwards, so
//! `neighbor(v, i)` answers are reproducible for a given input file.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type VertexId = u32;

/// An edge seen from one endpoint. `(u, v)` and `(v, u)` are different values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub source: VertexId,
    pub target: VertexId,
}

impl OrientedEdge {
    pub fn new(source: VertexId, target: VertexId) -> Self {
        OrientedEdge { source, target }
    }

    pub fn reversed(self) -> Self {
        OrientedEdge::new(self.target, self.source)
    }

    /// The unordered pair as `(min, max)`.
    pub fn folded(self) -> (VertexId, VertexId) {
        (self.source.min(self.target), self.source.max(self.target))
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    /// Undirected edges in insertion order; writing them back reproduces
    /// every adjacency ordering.
    edges: Vec<(VertexId, VertexId)>,
}

impl Graph {
    /// Builds a graph on `n` vertices from undirected edges.
    ///
    /// Rejects self-loops, repeated pairs (in either orientation) and ids
    /// not below `n`. Error line numbers are 1-based edge positions.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Graph, GraphError> {
        let lines: Vec<usize> = (1..=edges.len()).collect();
        Graph::build(n, edges, &lines)
    }

    fn build(
        n: usize,
        edges: &[(VertexId, VertexId)],
        lines: &[usize],
    ) -> Result<Graph, GraphError> {
        if n > VertexId::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut degree = vec![0usize; n];
        for (&(u, v), &line) in edges.iter().zip(lines) {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange { line, vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line, vertex: u });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; 2 * edges.len()];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }

        Ok(Graph {
            offsets,
            targets,
            edges: edges.to_vec(),
        })
    }

    /// Parses the edge-list text format.
    ///
    /// An optional first line `# n=<N>` declares the vertex count; without it
    /// `n` is one more than the largest id. Other `#` lines and blank lines
    /// are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut declared_n = None;
        let mut edges = Vec::new();
        let mut lines = Vec::new();
        let mut first_content = true;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let is_first = std::mem::replace(&mut first_content, false);
            if let Some(comment) = line.strip_prefix('#') {
                if is_first {
                    if let Some(value) = comment.trim().strip_prefix("n=") {
                        let n = value.trim().parse::<usize>().map_err(|e| GraphError::Parse {
                            line: line_no,
                            message: format!("bad vertex count {value:?}: {e}"),
                        })?;
                        declared_n = Some(n);
                    }
                }
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut id = || -> Result<VertexId, GraphError> {
                let field = fields.next().ok_or_else(|| GraphError::Parse {
                    line: line_no,
                    message: "expected two vertex ids".into(),
                })?;
                field.parse::<VertexId>().map_err(|e| GraphError::Parse {
                    line: line_no,
                    message: format!("bad vertex id {field:?}: {e}"),
                })
            };
            let u = id()?;
            let v = id()?;
            if fields.next().is_some() {
                return Err(GraphError::Parse {
                    line: line_no,
                    message: "trailing data after two vertex ids".into(),
                });
            }
            edges.push((u, v));
            lines.push(line_no);
        }

        let n = match declared_n {
            Some(n) => n,
            None => edges
                .iter()
                .map(|&(u, v)| u.max(v) as usize + 1)
                .max()
                .unwrap_or(0),
        };
        Graph::build(n, &edges, &lines)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| GraphError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Graph::parse_edge_list(&text)
    }

    /// Serializes to the edge-list format with an `# n=` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n={}\n", self.n());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let path = path.as_ref();
        let io = |source| GraphError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut file = fs::File::create(path).map_err(io)?;
        file.write_all(self.to_edge_list().as_bytes()).map_err(io)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of oriented edges, i.e. the sum of all degrees.
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn avg_degree(&self) -> f64 {
        self.m() as f64 / self.n() as f64
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.n() as VertexId
    }

    /// All oriented edges, grouped by source in adjacency order.
    ///
    /// The position of an edge in this sequence is its edge index, used by
    /// [`EdgeDistribution`](crate::harness::EdgeDistribution).
    pub fn oriented_edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(move |&w| OrientedEdge::new(u, w))
        })
    }

    /// Index of `edge` in [`Graph::oriented_edges`] order.
    pub fn edge_index(&self, edge: OrientedEdge) -> Option<usize> {
        if edge.source as usize >= self.n() {
            return None;
        }
        let base = self.offsets[edge.source as usize];
        self.neighbors(edge.source)
            .iter()
            .position(|&w| w == edge.target)
            .map(|i| base + i)
    }

    /// Index of the `i`-th oriented edge leaving `source`.
    pub fn slot(&self, source: VertexId, i: usize) -> usize {
        self.offsets[source as usize] + i
    }

    /// FNV-1a digest of `n` and every adjacency list, in order.
    pub fn fingerprint(&self) -> String {
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |word: u64| {
            for byte in word.to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(PRIME);
            }
        };
        feed(self.n() as u64);
        for v in self.vertices() {
            feed(self.degree(v) as u64);
            for &w in self.neighbors(v) {
                feed(w as u64);
            }
        }
        format!("{hash:016x}")
    }

    /// Checks the structural invariants: symmetric, simple, degree sum.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut degree_sum = 0;
        for v in self.vertices() {
            let nbrs = self.neighbors(v);
            degree_sum += nbrs.len();
            let mut seen = HashSet::with_capacity(nbrs.len());
            for &w in nbrs {
                if w == v {
                    return Err(format!("self-loop at {v}"));
                }
                if !seen.insert(w) {
                    return Err(format!("{w} listed twice in adjacency of {v}"));
                }
                if !self.neighbors(w).contains(&v) {
                    return Err(format!("{w} is a neighbor of {v} but not vice versa"));
                }
            }
        }
        if degree_sum != self.m() || degree_sum % 2 != 0 {
            return Err(format!("degree sum {degree_sum} does not match m={}", self.m()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_text() {
        let g = Graph::parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 4);
        assert_eq!(g.neighbors(1), &[0, 2]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn header_wins_over_inferred_n() {
        let g = Graph::parse_edge_list("# n=5\n# a comment\n0 1\n\n1 2\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.degree(4), 0);
        assert_eq!(g.neighbors(4), &[] as &[VertexId]);
    }

    #[test]
    fn rejects_self_loop() {
        let err = Graph::parse_edge_list("0 0").unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop { line: 1, vertex: 0 }));
    }

    #[test]
    fn rejects_duplicates_in_either_orientation() {
        assert!(matches!(
            Graph::parse_edge_list("0 1\n0 1").unwrap_err(),
            GraphError::DuplicateEdge { line: 2, .. }
        ));
        assert!(matches!(
            Graph::parse_edge_list("0 1\n1 0").unwrap_err(),
            GraphError::DuplicateEdge { line: 2, .. }
        ));
    }

    #[test]
    fn rejects_ids_past_header() {
        assert!(matches!(
            Graph::parse_edge_list("# n=2\n0 1\n1 2").unwrap_err(),
            GraphError::VertexOutOfRange { line: 3, vertex: 2, n: 2 }
        ));
    }

    #[test]
    fn rejects_malformed_lines() {
        for text in ["0", "0 x", "0 1 2", "-1 2"] {
            assert!(
                matches!(Graph::parse_edge_list(text), Err(GraphError::Parse { line: 1, .. })),
                "{text:?}"
            );
        }
    }

    #[test]
    fn adjacency_keeps_file_order() {
        let g = Graph::parse_edge_list("2 0\n2 3\n1 2").unwrap();
        assert_eq!(g.neighbors(2), &[0, 3, 1]);
        let again = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, again);
        assert_eq!(g.fingerprint(), again.fingerprint());
    }

    #[test]
    fn edge_indices_follow_oriented_order() {
        let g = Graph::parse_edge_list("0 1\n1 2\n2 0").unwrap();
        for (i, e) in g.oriented_edges().enumerate() {
            assert_eq!(g.edge_index(e), Some(i));
        }
        assert_eq!(g.edge_index(OrientedEdge::new(0, 0)), None);
        assert_eq!(g.edge_index(OrientedEdge::new(9, 0)), None);
    }
}
