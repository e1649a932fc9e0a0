//! Independent reference computations: exhaustive state enumeration and
//! Monte Carlo sampling. Neither shares code with the cut-set engine.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_pair, check_probability, ReliabilityError};
use crate::graph::{Graph, NodeId};

/// Largest arc count accepted by the exhaustive oracle.
pub const BRUTE_FORCE_MAX_ARCS: usize = 20;

fn reaches(
    n: usize,
    arcs: &[(NodeId, NodeId)],
    up: impl Fn(usize) -> bool,
    s: NodeId,
    t: NodeId,
) -> bool {
    let mut out: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (a, &(i, j)) in arcs.iter().enumerate() {
        if up(a) {
            out[i].push(j);
        }
    }
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            return true;
        }
        for &w in &out[u] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// `C_0..C_m` by trying every arc subset.
pub fn brute_force_cut_counts(
    g: &Graph,
    s: NodeId,
    t: NodeId,
) -> Result<Vec<u64>, ReliabilityError> {
    check_pair(g, s, t)?;
    let arcs: Vec<_> = g.arcs().collect();
    let m = arcs.len();
    if m > BRUTE_FORCE_MAX_ARCS {
        return Err(ReliabilityError::TooManyArcs(m));
    }
    let mut counts = vec![0u64; m + 1];
    for failed in 0u32..(1 << m) {
        if !reaches(g.n(), &arcs, |a| failed & (1 << a) == 0, s, t) {
            counts[failed.count_ones() as usize] += 1;
        }
    }
    Ok(counts)
}

/// Sum of `p^|up| (1-p)^|down|` over all arc states in which `t` is reachable.
pub fn brute_force_reliability(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    p: f64,
) -> Result<f64, ReliabilityError> {
    check_probability(p)?;
    let counts = brute_force_cut_counts(g, s, t)?;
    let m = counts.len() - 1;
    let mut binom = 1u64;
    let mut total = 0.0;
    for (down, &bad) in counts.iter().enumerate() {
        let good = binom - bad;
        total += good as f64 * p.powi((m - down) as i32) * (1.0 - p).powi(down as i32);
        binom = binom * (m - down) as u64 / (down + 1) as u64;
    }
    Ok(total)
}

/// Reachability frequency over `trials` independent arc-state samples, and
/// its binomial standard error. Deterministic for a given `seed`.
pub fn monte_carlo_reliability(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64), ReliabilityError> {
    check_pair(g, s, t)?;
    check_probability(p)?;
    if trials == 0 {
        return Err(ReliabilityError::NoTrials);
    }
    let arcs: Vec<_> = g.arcs().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut up = vec![false; arcs.len()];
    let mut hits = 0u64;
    for _ in 0..trials {
        for slot in up.iter_mut() {
            *slot = rng.gen::<f64>() < p;
        }
        if reaches(g.n(), &arcs, |a| up[a], s, t) {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok((estimate, std_error))
}
