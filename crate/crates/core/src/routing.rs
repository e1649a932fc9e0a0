//! Tree-based routing tables and the overlay graphs they induce.
//!
//! Every node keeps at most one entry per address-tree level `k`: the route
//! toward its sibling subtree at that level. Costs are hop counts to the
//! nearest subtree member, learned by synchronous distance-vector rounds in
//! which a neighbour's level-`k` cost is only usable when the neighbour shares
//! the node's own level-`k` subtree.
//!
//! A neighbour `w` of `u` is *admissible* for level `k` when it either lies in
//! the sibling subtree itself, or stays in `u`'s subtree with a strictly
//! smaller `(cost, id)` pair. Each hop therefore decreases the potential
//! `(l - matched prefix, cost, id)`, so forwarding is loop-free and every
//! per-destination next-hop graph is a DAG.
//!
//! * [`Mode::Dart`] keeps the single admissible neighbour minimizing
//!   `(cost via neighbour, id)`.
//! * [`Mode::Atr`] keeps every admissible neighbour.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::addressing::AddressMap;
use crate::graph::{Graph, NodeId};

/// Cap on enumerated paths per pair.
pub const MAX_PATHS_PER_PAIR: usize = 1_000_000;

const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoutingError {
    #[error("address map covers {addressed} nodes but the graph has {n}")]
    IncompleteAddressMap { addressed: usize, n: usize },
    #[error("routing tables were built for another graph or address map")]
    TableMismatch,
    #[error("source and target must differ (both are {0})")]
    SameEndpoints(NodeId),
    #[error("node {0} out of range")]
    BadNode(NodeId),
    #[error("path enumeration truncated at {MAX_PATHS_PER_PAIR} paths for pair ({0}, {1})")]
    Truncated(NodeId, NodeId),
}

/// Table population strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// One next hop per level.
    Dart,
    /// Every loop-free next hop per level.
    Atr,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Dart => "dart",
            Mode::Atr => "atr",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dart" => Ok(Mode::Dart),
            "atr" => Ok(Mode::Atr),
            other => Err(format!(
                "unknown routing mode `{other}` (expected dart or atr)"
            )),
        }
    }
}

/// Route toward one sibling subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteEntry {
    pub level: u32,
    /// `(neighbour, hop cost through it)`, sorted by neighbour id. Never empty.
    pub next_hops: Vec<(NodeId, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTables {
    mode: Mode,
    bits: u32,
    /// `cost[u][k]`: hops from `u` to its level-`k` sibling subtree.
    cost: Vec<Vec<u32>>,
    entries: Vec<Vec<Option<RouteEntry>>>,
}

impl RoutingTables {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn entry(&self, u: NodeId, level: u32) -> Option<&RouteEntry> {
        self.entries.get(u)?.get(level as usize)?.as_ref()
    }

    /// Entries held by `u`, shallowest level first.
    pub fn entries_of(&self, u: NodeId) -> impl Iterator<Item = &RouteEntry> {
        self.entries[u].iter().flatten()
    }

    pub fn cost(&self, u: NodeId, level: u32) -> Option<u32> {
        let c = self.cost[u][level as usize];
        (c != UNREACHABLE).then_some(c)
    }

    /// Next hops of `u` toward `t`; empty when no entry exists.
    fn hops_toward(&self, addrs: &AddressMap, u: NodeId, t: NodeId) -> &[(NodeId, u32)] {
        let k = addrs.divergence(u, t);
        self.entry(u, k).map_or(&[], |e| e.next_hops.as_slice())
    }
}

fn check_inputs(g: &Graph, addrs: &AddressMap) -> Result<(), RoutingError> {
    if addrs.len() != g.n() {
        return Err(RoutingError::IncompleteAddressMap {
            addressed: addrs.len(),
            n: g.n(),
        });
    }
    Ok(())
}

/// Runs distance-vector rounds to a fixed point and fills the tables.
pub fn build_tables(
    g: &Graph,
    addrs: &AddressMap,
    mode: Mode,
) -> Result<RoutingTables, RoutingError> {
    check_inputs(g, addrs)?;
    let n = g.n();
    let levels = addrs.bits() as usize;

    let mut cost = vec![vec![UNREACHABLE; levels]; n];
    for _round in 0..=n {
        let mut next = vec![vec![UNREACHABLE; levels]; n];
        for (u, row) in next.iter_mut().enumerate() {
            for &w in g.out_neighbors(u) {
                let d = addrs.divergence(u, w) as usize;
                if d < levels {
                    // w sits in u's sibling subtree at level d.
                    row[d] = 1;
                }
                // Deeper levels share w's subtree, so w's costs apply.
                for (slot, &c) in row.iter_mut().zip(&cost[w]).take(d.min(levels)) {
                    if c != UNREACHABLE {
                        *slot = (*slot).min(c + 1);
                    }
                }
            }
        }
        if next == cost {
            break;
        }
        cost = next;
    }

    let mut entries = vec![vec![None; levels]; n];
    for u in 0..n {
        for k in 0..levels {
            let own = cost[u][k];
            if own == UNREACHABLE {
                continue;
            }
            let mut hops: Vec<(NodeId, u32)> = g
                .out_neighbors(u)
                .iter()
                .filter_map(|&w| {
                    let d = addrs.divergence(u, w) as usize;
                    if d == k {
                        Some((w, 1))
                    } else if d > k && cost[w][k] != UNREACHABLE && (cost[w][k], w) < (own, u) {
                        Some((w, cost[w][k] + 1))
                    } else {
                        None
                    }
                })
                .collect();
            if mode == Mode::Dart {
                let best = hops.iter().copied().min_by_key(|&(w, c)| (c, w));
                hops = best.into_iter().collect();
            }
            if !hops.is_empty() {
                entries[u][k] = Some(RouteEntry {
                    level: k as u32,
                    next_hops: hops,
                });
            }
        }
    }

    Ok(RoutingTables {
        mode,
        bits: addrs.bits(),
        cost,
        entries,
    })
}

/// Paths discovered by hop-by-hop forwarding from `source` to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSet {
    pub source: NodeId,
    pub target: NodeId,
    pub paths: Vec<Vec<NodeId>>,
    /// Enumeration stopped at [`MAX_PATHS_PER_PAIR`].
    pub truncated: bool,
}

impl PathSet {
    /// One path per line, node ids joined by `-`.
    pub fn to_text(&self) -> String {
        self.paths
            .iter()
            .map(|p| {
                let ids: Vec<String> = p.iter().map(ToString::to_string).collect();
                ids.join("-") + "\n"
            })
            .collect()
    }
}

fn check_tables(tables: &RoutingTables, g: &Graph, addrs: &AddressMap) -> Result<(), RoutingError> {
    check_inputs(g, addrs)?;
    if tables.n() != g.n() || tables.bits != addrs.bits() {
        return Err(RoutingError::TableMismatch);
    }
    Ok(())
}

/// Enumerates every forwarding path from `s` to `t`, branching over all
/// stored next hops.
pub fn discover_paths(
    tables: &RoutingTables,
    g: &Graph,
    addrs: &AddressMap,
    s: NodeId,
    t: NodeId,
) -> Result<PathSet, RoutingError> {
    check_tables(tables, g, addrs)?;
    for v in [s, t] {
        if v >= g.n() {
            return Err(RoutingError::BadNode(v));
        }
    }
    if s == t {
        return Err(RoutingError::SameEndpoints(s));
    }

    let mut set = PathSet {
        source: s,
        target: t,
        paths: Vec::new(),
        truncated: false,
    };
    let mut path = vec![s];
    // Stack of (node, index of the next hop to try).
    let mut stack = vec![(s, 0usize)];
    while let Some(&mut (u, ref mut next)) = stack.last_mut() {
        let hops = tables.hops_toward(addrs, u, t);
        if *next >= hops.len() {
            stack.pop();
            path.pop();
            continue;
        }
        let (w, _) = hops[*next];
        *next += 1;
        if w == t {
            let mut found = path.clone();
            found.push(t);
            set.paths.push(found);
            if set.paths.len() >= MAX_PATHS_PER_PAIR {
                set.truncated = true;
                break;
            }
        } else {
            path.push(w);
            stack.push((w, 0));
        }
    }
    Ok(set)
}

/// Overlay graph: every arc lying on at least one forwarding path between an
/// ordered pair of distinct nodes.
///
/// Computed arc-wise: for each destination `t`, arc `(u, w)` of the next-hop
/// DAG is kept when `w` can still reach `t`. Every `u != t` is a source in its
/// own right, so forward reachability holds trivially.
pub fn overlay_graph(
    tables: &RoutingTables,
    g: &Graph,
    addrs: &AddressMap,
) -> Result<Graph, RoutingError> {
    check_tables(tables, g, addrs)?;
    let n = g.n();
    let mut keep = vec![vec![false; n]; n];
    let mut into: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for t in 0..n {
        for list in &mut into {
            list.clear();
        }
        for u in (0..n).filter(|&u| u != t) {
            for &(w, _) in tables.hops_toward(addrs, u, t) {
                into[w].push(u);
            }
        }
        let mut reaches = vec![false; n];
        reaches[t] = true;
        let mut queue = VecDeque::from([t]);
        while let Some(w) = queue.pop_front() {
            for &u in &into[w] {
                keep[u][w] = true;
                if !reaches[u] {
                    reaches[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    Ok(arcs_to_graph(&keep))
}

/// Overlay graph built from explicitly enumerated path sets. Fails if any
/// pair hits the enumeration cap.
pub fn overlay_graph_enumerated(
    tables: &RoutingTables,
    g: &Graph,
    addrs: &AddressMap,
) -> Result<Graph, RoutingError> {
    let n = g.n();
    let mut keep = vec![vec![false; n]; n];
    for s in 0..n {
        for t in (0..n).filter(|&t| t != s) {
            let set = discover_paths(tables, g, addrs, s, t)?;
            if set.truncated {
                return Err(RoutingError::Truncated(s, t));
            }
            for path in &set.paths {
                for hop in path.windows(2) {
                    keep[hop[0]][hop[1]] = true;
                }
            }
        }
    }
    Ok(arcs_to_graph(&keep))
}

fn arcs_to_graph(keep: &[Vec<bool>]) -> Graph {
    let n = keep.len();
    let arcs = (0..n).flat_map(|u| (0..n).filter(move |&w| keep[u][w]).map(move |w| (u, w)));
    Graph::directed_from_arcs(n, arcs).expect("overlay arcs are distinct physical arcs")
}
