//! Probabilistic network graphs.
//!
//! Every stored arc is an independent link that operates with the uniform
//! success probability of a [`LinkModel`]. Vertices never fail. An undirected
//! graph is a symmetric digraph: both orientations are stored and each one
//! fails on its own.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

/// Vertex identifier, `0..n`.
pub type NodeId = usize;

/// Errors raised while building or reading a [`Graph`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: expected header `<n> <directed|undirected>`")]
    BadHeader { line: usize },
    #[error("row {row}, column {col}: entry is not 0 or 1")]
    BadEntry { row: usize, col: usize },
    #[error("row {row}: expected {expected} entries, found {found}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} matrix rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}, column {col}: nonzero diagonal entry")]
    NonZeroDiagonal { row: usize, col: usize },
    #[error("row {row}, column {col}: undirected matrix is not symmetric")]
    Asymmetric { row: usize, col: usize },
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: NodeId, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(NodeId),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(NodeId, NodeId),
    #[error("source and target must differ (both are {0})")]
    SameEndpoints(NodeId),
}

/// Uniform link success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    p: f64,
}

impl LinkModel {
    pub fn new(p: f64) -> Option<Self> {
        (0.0..=1.0).contains(&p).then_some(Self { p })
    }

    /// Probability that a link operates.
    pub fn success(&self) -> f64 {
        self.p
    }

    /// Probability that a link fails.
    pub fn failure(&self) -> f64 {
        1.0 - self.p
    }
}

/// A simple graph on vertices `0..n`, stored as sorted out-neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    directed: bool,
    out: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Graph with `n` vertices and no arcs.
    pub fn empty(n: usize, directed: bool) -> Self {
        Self {
            directed,
            out: vec![Vec::new(); n],
        }
    }

    /// Builds a directed graph from ordered pairs.
    pub fn directed_from_arcs<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::empty(n, true);
        for (i, j) in arcs {
            g.insert_arc(i, j)?;
        }
        Ok(g)
    }

    /// Builds an undirected graph; each pair contributes both orientations.
    pub fn undirected_from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::empty(n, false);
        for (i, j) in edges {
            g.insert_arc(i, j)?;
            g.insert_arc(j, i)?;
        }
        Ok(g)
    }

    fn insert_arc(&mut self, i: NodeId, j: NodeId) -> Result<(), GraphError> {
        let n = self.n();
        for v in [i, j] {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
        }
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        let list = &mut self.out[i];
        match list.binary_search(&j) {
            Ok(_) => Err(GraphError::DuplicateArc(i, j)),
            Err(pos) => {
                list.insert(pos, j);
                Ok(())
            }
        }
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored arcs (an undirected edge counts twice).
    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out[v]
    }

    pub fn has_arc(&self, i: NodeId, j: NodeId) -> bool {
        self.out
            .get(i)
            .is_some_and(|list| list.binary_search(&j).is_ok())
    }

    /// All arcs in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&j| (i, j)))
    }

    /// True if every arc of `self` is also an arc of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n() == other.n() && self.arcs().all(|(i, j)| other.has_arc(i, j))
    }

    /// The same arc set viewed as a directed graph.
    pub fn as_directed(&self) -> Graph {
        Graph {
            directed: true,
            out: self.out.clone(),
        }
    }

    fn check_vertex(&self, v: NodeId) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// Vertices reachable from `s` (including `s`), as a membership mask.
    pub fn reachable_from(&self, s: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &self.out[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Arcs reversed.
    pub fn reversed(&self) -> Graph {
        let mut out = vec![Vec::new(); self.n()];
        for (i, j) in self.arcs() {
            out[j].push(i);
        }
        for list in &mut out {
            list.sort_unstable();
        }
        Graph {
            directed: self.directed,
            out,
        }
    }

    /// True when every vertex reaches every other one.
    pub fn is_strongly_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        self.reachable_from(0).iter().all(|&b| b)
            && self.reversed().reachable_from(0).iter().all(|&b| b)
    }
}

/// True iff a directed path `s -> t` exists. `s == t` is always connected.
pub fn is_connected(g: &Graph, s: NodeId, t: NodeId) -> Result<bool, GraphError> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    Ok(s == t || g.reachable_from(s)[t])
}

/// Minimum number of arcs whose removal disconnects `t` from `s`.
///
/// Unit-capacity max flow with BFS augmenting paths.
pub fn min_cut_size(g: &Graph, s: NodeId, t: NodeId) -> Result<usize, GraphError> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if s == t {
        return Err(GraphError::SameEndpoints(s));
    }

    // Residual network: forward arc index 2k, its reverse 2k + 1.
    let n = g.n();
    let mut head = Vec::new();
    let mut cap = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j) in g.arcs() {
        adj[i].push(head.len());
        head.push(j);
        cap.push(1u32);
        adj[j].push(head.len());
        head.push(i);
        cap.push(0u32);
    }

    let mut flow = 0;
    let mut via = vec![usize::MAX; n];
    loop {
        via.fill(usize::MAX);
        let mut queue = VecDeque::from([s]);
        let mut found = false;
        'bfs: while let Some(u) = queue.pop_front() {
            for &e in &adj[u] {
                let w = head[e];
                if cap[e] > 0 && w != s && via[w] == usize::MAX {
                    via[w] = e;
                    if w == t {
                        found = true;
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return Ok(flow);
        }
        let mut v = t;
        while v != s {
            let e = via[v];
            cap[e] -= 1;
            cap[e ^ 1] += 1;
            v = head[e ^ 1];
        }
        flow += 1;
    }
}

/// Parses the adjacency matrix text format.
///
/// The first non-comment line is `<n> <directed|undirected>`, followed by `n`
/// rows of `n` whitespace-separated `0`/`1` entries. Lines starting with `#`
/// are ignored. Rows and columns in errors are 0-based matrix indices.
pub fn parse_adjacency_matrix(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());

    let (header_line, header) = lines.next().ok_or(GraphError::BadHeader { line: 1 })?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|tok| tok.parse().ok())
        .ok_or(GraphError::BadHeader { line: header_line })?;
    let directed = match parts.next() {
        Some("directed") => true,
        Some("undirected") => false,
        _ => return Err(GraphError::BadHeader { line: header_line }),
    };
    if parts.next().is_some() {
        return Err(GraphError::BadHeader { line: header_line });
    }

    let mut matrix = vec![vec![false; n]; n];
    let mut rows = 0;
    for (_, line) in lines {
        if rows == n {
            return Err(GraphError::RowCount {
                expected: n,
                found: rows + 1,
            });
        }
        let row = rows;
        let mut found = 0;
        for (col, tok) in line.split_whitespace().enumerate() {
            let bit = match tok {
                "0" => false,
                "1" => true,
                _ => return Err(GraphError::BadEntry { row, col }),
            };
            if col < n {
                matrix[row][col] = bit;
            }
            found += 1;
        }
        if found != n {
            return Err(GraphError::NotSquare {
                row,
                expected: n,
                found,
            });
        }
        rows += 1;
    }
    if rows != n {
        return Err(GraphError::RowCount {
            expected: n,
            found: rows,
        });
    }

    let mut g = Graph::empty(n, directed);
    for (row, entries) in matrix.iter().enumerate() {
        if entries[row] {
            return Err(GraphError::NonZeroDiagonal { row, col: row });
        }
        for (col, &bit) in entries.iter().enumerate() {
            if !directed && bit != matrix[col][row] {
                return Err(GraphError::Asymmetric { row, col });
            }
            if bit {
                g.out[row].push(col);
            }
        }
    }
    Ok(g)
}

/// Canonical matrix text: header, then one row per line, single spaces, LF.
pub fn serialize_adjacency_matrix(g: &Graph) -> String {
    let n = g.n();
    let mut out = String::with_capacity(16 + 2 * n * n);
    let kind = if g.directed { "directed" } else { "undirected" };
    let _ = writeln!(out, "{n} {kind}");
    let mut row = vec![b'0'; n];
    for list in &g.out {
        row.fill(b'0');
        for &j in list {
            row[j] = b'1';
        }
        for (k, &b) in row.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push(b as char);
        }
        out.push('\n');
    }
    out
}
