//! Binary tree address space and centralized address allocation.
//!
//! An `l`-bit address is a leaf of a binary tree with `l + 1` levels; bit 0
//! is the most significant one and selects the top-level subtree. For a node
//! with address `a`, its *sibling subtree at level k* is the set of addresses
//! that agree with `a` on bits `0..k` and differ at bit `k`. The sibling
//! subtrees at levels `0..l` partition every other address.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Longest supported address.
pub const MAX_BITS: u32 = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("addresses have different lengths ({0} and {1} bits)")]
    LengthMismatch(u32, u32),
    #[error("address length must be in 1..={MAX_BITS}, got {0}")]
    BadLength(u32),
    #[error("{bits}-bit address space cannot hold {n} nodes")]
    SpaceTooSmall { bits: u32, n: usize },
    #[error("address allocation needs an undirected graph")]
    Directed,
    #[error("root {root} out of range for {n} nodes")]
    BadRoot { root: NodeId, n: usize },
    #[error("node {0} is not reachable from the root")]
    Disconnected(NodeId),
    #[error("no free address for node {0} under the allocation rule")]
    Exhausted(NodeId),
    #[error("address map line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A fixed-length bit string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    bits: u64,
    len: u32,
}

impl Address {
    pub fn new(bits: u64, len: u32) -> Result<Self, AddressError> {
        if len == 0 || len > MAX_BITS {
            return Err(AddressError::BadLength(len));
        }
        Ok(Self {
            bits: bits & ((1u64 << len) - 1),
            len,
        })
    }

    pub fn zero(len: u32) -> Result<Self, AddressError> {
        Self::new(0, len)
    }

    /// Parses a string of `0`/`1` characters, most significant bit first.
    pub fn parse(s: &str) -> Option<Self> {
        let len = u32::try_from(s.len()).ok()?;
        let bits = s.chars().try_fold(0u64, |acc, c| match c {
            '0' => Some(acc << 1),
            '1' => Some(acc << 1 | 1),
            _ => None,
        })?;
        Self::new(bits, len).ok()
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Raw value, bit 0 in the highest used position.
    pub fn value(&self) -> u64 {
        self.bits
    }

    /// Bit `k`, counted from the most significant end.
    pub fn bit(&self, k: u32) -> bool {
        (self.bits >> (self.len - 1 - k)) & 1 == 1
    }

    /// The first `k` bits as an integer.
    pub fn prefix(&self, k: u32) -> u64 {
        if k == 0 {
            0
        } else {
            self.bits >> (self.len - k)
        }
    }

    /// `self` with bit `k` flipped and every deeper bit cleared.
    fn child_candidate(&self, k: u32) -> Self {
        let shift = self.len - 1 - k;
        let flipped = self.bits ^ (1u64 << shift);
        Self {
            bits: (flipped >> shift) << shift,
            len: self.len,
        }
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len {
            f.write_str(if self.bit(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Index of the first differing bit; `l` when the addresses are equal.
pub fn level_of_divergence(a: Address, b: Address) -> Result<u32, AddressError> {
    if a.len != b.len {
        return Err(AddressError::LengthMismatch(a.len, b.len));
    }
    Ok(divergence(a, b))
}

#[inline]
pub(crate) fn divergence(a: Address, b: Address) -> u32 {
    let diff = a.bits ^ b.bits;
    if diff == 0 {
        a.len
    } else {
        diff.leading_zeros() - (64 - a.len)
    }
}

/// Default address length for `n` nodes: `ceil(log2 n) + 2`.
pub fn default_bits(n: usize) -> u32 {
    let n = n.max(1);
    (usize::BITS - (n - 1).leading_zeros()) + 2
}

/// Node → address assignment over every node of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddressMap {
    bits: u32,
    root: NodeId,
    assignment: Vec<Address>,
}

impl AddressMap {
    /// Wraps an explicit assignment after checking lengths and injectivity.
    pub fn from_assignment(
        bits: u32,
        root: NodeId,
        assignment: Vec<Address>,
    ) -> Result<Self, AddressError> {
        if bits == 0 || bits > MAX_BITS {
            return Err(AddressError::BadLength(bits));
        }
        let mut seen = HashSet::new();
        for (v, a) in assignment.iter().enumerate() {
            if a.len != bits {
                return Err(AddressError::LengthMismatch(a.len, bits));
            }
            if !seen.insert(a.bits) {
                return Err(AddressError::Parse {
                    line: v + 2,
                    reason: format!("address {a} assigned twice"),
                });
            }
        }
        if root >= assignment.len().max(1) {
            return Err(AddressError::BadRoot {
                root,
                n: assignment.len(),
            });
        }
        Ok(Self {
            bits,
            root,
            assignment,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn addr(&self, v: NodeId) -> Address {
        self.assignment[v]
    }

    pub fn addresses(&self) -> &[Address] {
        &self.assignment
    }

    /// Level at which the addresses of `u` and `v` diverge.
    pub fn divergence(&self, u: NodeId, v: NodeId) -> u32 {
        divergence(self.assignment[u], self.assignment[v])
    }

    /// Nodes in the sibling subtree of `v` at level `k`.
    pub fn sibling_subtree(&self, v: NodeId, k: u32) -> Vec<NodeId> {
        (0..self.len())
            .filter(|&w| w != v && self.divergence(v, w) == k)
            .collect()
    }

    /// Address map text: `l=<bits> root=<id>`, then `id bitstring` per node.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "l={} root={}", self.bits, self.root);
        for (v, a) in self.assignment.iter().enumerate() {
            let _ = writeln!(out, "{v} {a}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AddressError> {
        let bad = |line: usize, reason: &str| AddressError::Parse {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
        let mut bits = None;
        let mut root = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("l=") {
                bits = v.parse::<u32>().ok();
            } else if let Some(v) = tok.strip_prefix("root=") {
                root = v.parse::<usize>().ok();
            }
        }
        let (bits, root) = bits
            .zip(root)
            .ok_or_else(|| bad(1, "expected `l=<bits> root=<id>`"))?;
        let mut assignment = Vec::new();
        for (line, row) in lines.filter(|(_, l)| !l.is_empty()) {
            let mut parts = row.split_whitespace();
            let id: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad(line, "bad node id"))?;
            if id != assignment.len() {
                return Err(bad(line, "node ids must be listed in order"));
            }
            let addr = parts
                .next()
                .and_then(Address::parse)
                .ok_or_else(|| bad(line, "bad bitstring"))?;
            assignment.push(addr);
        }
        Self::from_assignment(bits, root, assignment)
    }

    /// FNV-1a digest of [`Self::to_text`], for experiment metadata.
    pub fn digest(&self) -> u64 {
        self.to_text()
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
                (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
            })
    }
}

/// Deterministic centralized allocation.
///
/// The root takes the all-zeros address. Other nodes join in BFS order from
/// the root (neighbours visited by ascending id). A joining node asks its BFS
/// parent first, then its other addressed neighbours by ascending id. A
/// neighbour with address `a` offers `candidate(k)` for `k = l-1, ..., 0`:
/// `a` with bit `k` flipped and deeper bits cleared. The first candidate whose
/// `(k+1)`-bit prefix is not used by any assigned address is taken.
pub fn allocate_addresses(g: &Graph, root: NodeId, bits: u32) -> Result<AddressMap, AddressError> {
    let n = g.n();
    if bits == 0 || bits > MAX_BITS {
        return Err(AddressError::BadLength(bits));
    }
    if g.is_directed() {
        return Err(AddressError::Directed);
    }
    if root >= n {
        return Err(AddressError::BadRoot { root, n });
    }
    if (n as u128) > (1u128 << bits) {
        return Err(AddressError::SpaceTooSmall { bits, n });
    }

    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in g.out_neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    if let Some(v) = seen.iter().position(|&b| !b) {
        return Err(AddressError::Disconnected(v));
    }

    let mut assigned: Vec<Option<Address>> = vec![None; n];
    // (prefix length, prefix value) pairs used by at least one address.
    let mut occupied: HashSet<(u32, u64)> = HashSet::new();
    let claim = |addr: Address, occupied: &mut HashSet<(u32, u64)>| {
        for k in 1..=bits {
            occupied.insert((k, addr.prefix(k)));
        }
    };

    let root_addr = Address::zero(bits)?;
    assigned[root] = Some(root_addr);
    claim(root_addr, &mut occupied);

    for &v in order.iter().skip(1) {
        let givers = std::iter::once(parent[v]).chain(
            g.out_neighbors(v)
                .iter()
                .copied()
                .filter(|&u| u != parent[v] && assigned[u].is_some()),
        );
        let mut chosen = None;
        'givers: for u in givers {
            let base = assigned[u].expect("giver is addressed");
            for k in (0..bits).rev() {
                let cand = base.child_candidate(k);
                if !occupied.contains(&(k + 1, cand.prefix(k + 1))) {
                    chosen = Some(cand);
                    break 'givers;
                }
            }
        }
        let addr = chosen.ok_or(AddressError::Exhausted(v))?;
        assigned[v] = Some(addr);
        claim(addr, &mut occupied);
    }

    Ok(AddressMap {
        bits,
        root,
        assignment: assigned
            .into_iter()
            .map(|a| a.expect("all nodes addressed"))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::full_mesh;

    fn a(s: &str) -> Address {
        Address::parse(s).unwrap()
    }

    fn rendered(map: &AddressMap) -> Vec<String> {
        map.addresses().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn divergence_levels() {
        assert_eq!(level_of_divergence(a("000"), a("001")), Ok(2));
        assert_eq!(level_of_divergence(a("011"), a("100")), Ok(0));
        assert_eq!(level_of_divergence(a("0110"), a("0110")), Ok(4));
        assert_eq!(
            level_of_divergence(a("01"), a("011")),
            Err(AddressError::LengthMismatch(2, 3))
        );
    }

    #[test]
    fn default_bit_length() {
        assert_eq!(default_bits(1), 2);
        assert_eq!(default_bits(2), 3);
        assert_eq!(default_bits(4), 4);
        assert_eq!(default_bits(5), 5);
        assert_eq!(default_bits(16), 6);
    }

    #[test]
    fn two_node_path() {
        let g = Graph::undirected_from_edges(2, [(0, 1)]).unwrap();
        let map = allocate_addresses(&g, 0, 1).unwrap();
        assert_eq!(rendered(&map), ["0", "1"]);
    }

    #[test]
    fn star_fills_shallower_levels() {
        let g = Graph::undirected_from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let map = allocate_addresses(&g, 0, 3).unwrap();
        assert_eq!(rendered(&map), ["000", "001", "010", "100"]);
    }

    #[test]
    fn mesh_falls_back_to_other_neighbours() {
        let map = allocate_addresses(&full_mesh(4).unwrap(), 0, 2).unwrap();
        assert_eq!(rendered(&map), ["00", "01", "10", "11"]);
    }

    #[test]
    fn allocation_errors() {
        let g = Graph::undirected_from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(
            allocate_addresses(&g, 0, 3),
            Err(AddressError::Disconnected(2))
        );
        assert_eq!(
            allocate_addresses(&full_mesh(5).unwrap(), 0, 2),
            Err(AddressError::SpaceTooSmall { bits: 2, n: 5 })
        );
        // Star with three leaves and 2 bits: leaves take "01" and "10", then
        // the root has no free subtree left for the third one.
        let star = Graph::undirected_from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(
            allocate_addresses(&star, 0, 2),
            Err(AddressError::Exhausted(3))
        );
        let path = Graph::undirected_from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            rendered(&allocate_addresses(&path, 0, 2).unwrap()),
            ["00", "01", "10"]
        );
        let d = Graph::directed_from_arcs(2, [(0, 1)]).unwrap();
        assert_eq!(allocate_addresses(&d, 0, 2), Err(AddressError::Directed));
    }

    #[test]
    fn text_round_trip() {
        let map = allocate_addresses(&full_mesh(4).unwrap(), 0, 3).unwrap();
        let text = map.to_text();
        assert!(text.starts_with("l=3 root=0\n0 000\n"));
        assert_eq!(AddressMap::from_text(&text).unwrap(), map);
    }

    #[test]
    fn sibling_subtrees_partition_other_nodes() {
        let map = allocate_addresses(&full_mesh(6).unwrap(), 2, 4).unwrap();
        for v in 0..6 {
            let mut all: Vec<_> = (0..4).flat_map(|k| map.sibling_subtree(v, k)).collect();
            all.sort_unstable();
            let expected: Vec<_> = (0..6).filter(|&w| w != v).collect();
            assert_eq!(all, expected);
        }
    }
}
