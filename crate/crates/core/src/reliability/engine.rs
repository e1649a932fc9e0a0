//! Recursive-merge state enumeration and the exact unreliability recursion.
//!
//! A state is a supersource set `SS` grown from the source: merging one
//! frontier node, then absorbing every node other than the target whose
//! out-neighbours all lie in `SS`. Each distinct `SS` is visited once.
//!
//! For a state `K` let `Q(K)` be the probability, within the subgraph induced
//! by `K`, that the absorption closure of the set reached from the source is
//! exactly `K`. Then
//!
//! ```text
//! Q(K)   = 1 - sum over states K' ⊊ K of q^|arcs K' -> K \ K'| * Q(K')
//! Unrel  = sum over states K of q^|arcs leaving K| * Q(K)
//! ```
//!
//! The states partition the failure space by "which closure was reached",
//! and the outgoing cut of that closure must be entirely down. Values are
//! kept either as `f64` at a fixed `q` or as polynomials in `q` over a
//! coefficient ring from [`super::modular`].

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::modular::Modulus;
use super::{FrontierOrder, ReliabilityError};
use crate::graph::{Graph, NodeId};

/// Source/target problem restricted to nodes that lie on some `s -> t` walk.
#[derive(Debug, Clone)]
pub(crate) struct Pruned {
    /// Out-neighbour masks over compressed ids.
    out: Vec<u64>,
    s: usize,
    t: usize,
    /// Arcs kept after pruning.
    pub arcs: usize,
}

impl Pruned {
    /// `None` when `t` is unreachable from `s`.
    pub fn new(g: &Graph, s: NodeId, t: NodeId) -> Option<Self> {
        let fwd = g.reachable_from(s);
        if !fwd[t] {
            return None;
        }
        let bwd = g.reversed().reachable_from(t);
        let keep: Vec<NodeId> = (0..g.n()).filter(|&v| fwd[v] && bwd[v]).collect();
        let mut index = vec![usize::MAX; g.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut out = vec![0u64; keep.len()];
        let mut arcs = 0;
        for (i, &v) in keep.iter().enumerate() {
            for &w in g.out_neighbors(v) {
                if index[w] != usize::MAX {
                    out[i] |= 1 << index[w];
                    arcs += 1;
                }
            }
        }
        Some(Self {
            out,
            s: index[s],
            t: index[t],
            arcs,
        })
    }

    fn absorb(&self, mut mask: u64) -> u64 {
        loop {
            let mut grown = mask;
            for v in 0..self.out.len() {
                let bit = 1u64 << v;
                if v != self.t && grown & bit == 0 && self.out[v] & !grown == 0 {
                    grown |= bit;
                }
            }
            if grown == mask {
                return mask;
            }
            mask = grown;
        }
    }

    fn frontier(&self, mask: u64) -> u64 {
        let mut reach = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            reach |= self.out[u];
        }
        reach & !mask & !(1u64 << self.t)
    }

    /// Arcs from members of `from` into `into`.
    #[inline]
    fn arcs_between(&self, from: u64, into: u64) -> u32 {
        let mut total = 0;
        let mut rest = from;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += (self.out[u] & into).count_ones();
        }
        total
    }
}

/// Wall-clock budget shared by one enumeration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline {
    start: Instant,
    limit: Option<std::time::Duration>,
    s: NodeId,
    t: NodeId,
}

impl Deadline {
    pub fn new(limit: Option<std::time::Duration>, s: NodeId, t: NodeId) -> Self {
        Self {
            start: Instant::now(),
            limit,
            s,
            t,
        }
    }

    fn check(&self) -> Result<(), ReliabilityError> {
        match self.limit {
            Some(limit) if self.start.elapsed() > limit => Err(ReliabilityError::BudgetExceeded {
                s: self.s,
                t: self.t,
                budget_ms: limit.as_millis() as u64,
            }),
            _ => Ok(()),
        }
    }
}

enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl Lookup {
    #[inline]
    fn get(&self, mask: u64) -> Option<usize> {
        match self {
            Lookup::Dense(table) => {
                let i = table[mask as usize];
                (i != u32::MAX).then_some(i as usize)
            }
            Lookup::Sparse(map) => map.get(&mask).map(|&i| i as usize),
        }
    }
}

const DENSE_LOOKUP_MAX_NODES: usize = 22;
const CHECK_EVERY: u64 = 1 << 14;

/// Every supersource state of one `(s, t)` problem, smallest first.
pub(crate) struct StateSpace {
    pruned: Pruned,
    states: Vec<u64>,
    lookup: Lookup,
    cut: Vec<u32>,
    inner: Vec<u32>,
}

impl StateSpace {
    /// Recursive merge from the source with absorption and memoization.
    pub fn enumerate(
        pruned: Pruned,
        order: FrontierOrder,
        deadline: &Deadline,
    ) -> Result<Self, ReliabilityError> {
        let start = pruned.absorb(1u64 << pruned.s);
        let mut visited: HashSet<u64> = HashSet::new();
        let mut stack = vec![start];
        let mut steps = 0u64;
        while let Some(ss) = stack.pop() {
            if !visited.insert(ss) {
                continue;
            }
            steps += 1;
            if steps.is_multiple_of(1024) {
                deadline.check()?;
            }
            let mut frontier = pruned.frontier(ss);
            let mut next = Vec::with_capacity(frontier.count_ones() as usize);
            while frontier != 0 {
                let v = frontier.trailing_zeros();
                frontier &= frontier - 1;
                let merged = pruned.absorb(ss | 1u64 << v);
                if !visited.contains(&merged) {
                    next.push(merged);
                }
            }
            // The stack pops last-in first; push so the preferred node is explored first.
            match order {
                FrontierOrder::Ascending => stack.extend(next.into_iter().rev()),
                FrontierOrder::Descending => stack.extend(next),
            }
        }

        let mut states: Vec<u64> = visited.into_iter().collect();
        states.sort_unstable_by_key(|&m| (m.count_ones(), m));

        let nodes = pruned.out.len();
        let lookup = if nodes <= DENSE_LOOKUP_MAX_NODES {
            let mut table = vec![u32::MAX; 1usize << nodes];
            for (i, &m) in states.iter().enumerate() {
                table[m as usize] = i as u32;
            }
            Lookup::Dense(table)
        } else {
            Lookup::Sparse(
                states
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| (m, i as u32))
                    .collect(),
            )
        };
        let cut = states.iter().map(|&m| pruned.arcs_between(m, !m)).collect();
        let inner = states.iter().map(|&m| pruned.arcs_between(m, m)).collect();
        Ok(Self {
            pruned,
            states,
            lookup,
            cut,
            inner,
        })
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Calls `f(index, e)` for every state strictly inside state `k`, where
    /// `e` counts the arcs from that sub-state to the rest of `k`.
    fn for_each_substate<F>(
        &self,
        k: usize,
        deadline: &Deadline,
        work: &mut u64,
        mut f: F,
    ) -> Result<(), ReliabilityError>
    where
        F: FnMut(usize, u32),
    {
        let outer = self.states[k];
        let s_bit = 1u64 << self.pruned.s;
        let free = outer & !s_bit;
        if free == 0 {
            return Ok(());
        }
        let submasks = 1u64.checked_shl(free.count_ones()).unwrap_or(u64::MAX);
        let mut visit = |j: usize, sub: u64, work: &mut u64| -> Result<(), ReliabilityError> {
            f(j, self.pruned.arcs_between(sub, outer & !sub));
            *work += 1;
            if (*work).is_multiple_of(CHECK_EVERY) {
                deadline.check()?;
            }
            Ok(())
        };
        if submasks <= k as u64 {
            // Walk proper submasks of `outer` that keep the source.
            let mut rest = (free.wrapping_sub(1)) & free;
            loop {
                let sub = rest | s_bit;
                if let Some(j) = self.lookup.get(sub) {
                    visit(j, sub, work)?;
                }
                if rest == 0 {
                    break;
                }
                rest = (rest - 1) & free;
            }
        } else {
            let size = outer.count_ones();
            for (j, &sub) in self.states[..k].iter().enumerate() {
                if sub.count_ones() >= size {
                    break;
                }
                if sub & !outer == 0 {
                    visit(j, sub, work)?;
                }
            }
        }
        Ok(())
    }

    /// Unreliability at a fixed link failure probability `q`.
    pub fn unreliability_at(&self, q: f64, deadline: &Deadline) -> Result<f64, ReliabilityError> {
        let max_pow = self.pruned.arcs + 1;
        let mut q_pow = vec![1.0f64; max_pow + 1];
        for i in 1..=max_pow {
            q_pow[i] = q_pow[i - 1] * q;
        }
        let mut value = vec![0.0f64; self.states.len()];
        let mut work = 0;
        let mut unrel = 0.0;
        for k in 0..self.states.len() {
            let mut acc = 0.0;
            self.for_each_substate(k, deadline, &mut work, |j, e| {
                acc += q_pow[e as usize] * value[j]
            })?;
            value[k] = 1.0 - acc;
            unrel += q_pow[self.cut[k] as usize] * value[k];
        }
        Ok(unrel)
    }

    /// Unreliability as a polynomial in `q`, coefficients reduced by `modulus`.
    pub fn unreliability_poly(
        &self,
        modulus: Modulus,
        deadline: &Deadline,
    ) -> Result<Vec<u128>, ReliabilityError> {
        match modulus {
            Modulus::Pow2_128 => self.poly_in(Wrapping128, deadline),
            Modulus::Prime(p) => Ok(self
                .poly_in(PrimeField(p), deadline)?
                .into_iter()
                .map(u128::from)
                .collect()),
        }
    }

    fn poly_in<R: Ring>(
        &self,
        ring: R,
        deadline: &Deadline,
    ) -> Result<Vec<R::Elem>, ReliabilityError> {
        let mut value: Vec<Vec<R::Elem>> = Vec::with_capacity(self.states.len());
        let mut unrel = vec![R::ZERO; self.pruned.arcs + 1];
        let mut work = 0;
        for k in 0..self.states.len() {
            let mut acc = vec![R::ZERO; self.inner[k] as usize + 1];
            self.for_each_substate(k, deadline, &mut work, |j, e| {
                for (slot, &c) in acc[e as usize..].iter_mut().zip(&value[j]) {
                    *slot = ring.add(*slot, c);
                }
            })?;
            for c in acc.iter_mut() {
                *c = ring.neg(*c);
            }
            acc[0] = ring.add(acc[0], R::ONE);
            // Trailing zeros would only cost time in later additions.
            while acc.len() > 1 && acc[acc.len() - 1] == R::ZERO {
                acc.pop();
            }
            let shift = self.cut[k] as usize;
            for (slot, &c) in unrel[shift..].iter_mut().zip(&acc) {
                *slot = ring.add(*slot, c);
            }
            value.push(acc);
        }
        Ok(unrel)
    }
}

/// Additive structure the polynomial recursion needs, monomorphized so the
/// inner loop carries no modulus dispatch.
trait Ring: Copy {
    type Elem: Copy + PartialEq;
    const ZERO: Self::Elem;
    const ONE: Self::Elem;
    fn add(self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(self, a: Self::Elem) -> Self::Elem;
}

#[derive(Clone, Copy)]
struct Wrapping128;

impl Ring for Wrapping128 {
    type Elem = u128;
    const ZERO: u128 = 0;
    const ONE: u128 = 1;
    #[inline(always)]
    fn add(self, a: u128, b: u128) -> u128 {
        a.wrapping_add(b)
    }
    #[inline(always)]
    fn neg(self, a: u128) -> u128 {
        a.wrapping_neg()
    }
}

#[derive(Clone, Copy)]
struct PrimeField(u64);

impl Ring for PrimeField {
    type Elem = u64;
    const ZERO: u64 = 0;
    const ONE: u64 = 1;
    #[inline(always)]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }
    #[inline(always)]
    fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }
}
