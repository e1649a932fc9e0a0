//! Network-wide mean routing reliability over all ordered pairs.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{
    check_probability, enumerate_cut_counts_with, terminal_pair_reliability, EnumConfig,
    ReliabilityError, MAX_NODES,
};
use crate::graph::{Graph, NodeId};

/// Per-pair traffic weights `z_st`; pairs without an explicit weight use the
/// default (1 unless changed).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowWeights {
    default: f64,
    explicit: BTreeMap<(NodeId, NodeId), f64>,
}

impl Default for FlowWeights {
    fn default() -> Self {
        Self::uniform()
    }
}

impl FlowWeights {
    pub fn uniform() -> Self {
        Self {
            default: 1.0,
            explicit: BTreeMap::new(),
        }
    }

    pub fn with_default(z: f64) -> Result<Self, ReliabilityError> {
        check_weight(z)?;
        Ok(Self {
            default: z,
            explicit: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, s: NodeId, t: NodeId, z: f64) -> Result<(), ReliabilityError> {
        check_weight(z)?;
        self.explicit.insert((s, t), z);
        Ok(())
    }

    pub fn get(&self, s: NodeId, t: NodeId) -> f64 {
        self.explicit.get(&(s, t)).copied().unwrap_or(self.default)
    }
}

fn check_weight(z: f64) -> Result<(), ReliabilityError> {
    if (0.0..=1.0).contains(&z) {
        Ok(())
    } else {
        Err(ReliabilityError::BadWeight(z))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReliability {
    pub s: NodeId,
    pub t: NodeId,
    pub connected: bool,
    /// Minimum cut from the counts; `None` if the pair was aborted.
    pub min_cut: Option<usize>,
    /// `R_st` at each requested `p`; `None` if the pair ran out of budget.
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityReport {
    pub n: usize,
    pub p_values: Vec<f64>,
    /// Sorted by `(s, t)`.
    pub per_pair: Vec<PairReliability>,
    /// `sum z_st R_st / (n (n - 1))` at each `p`; NaN when a pair was aborted.
    pub mean: Vec<f64>,
    /// Population standard deviation of `z_st R_st` over ordered pairs.
    pub std: Vec<f64>,
    pub pairs_connected: usize,
    pub pairs_total: usize,
    /// Pairs that exceeded the compute budget.
    pub aborted: Vec<(NodeId, NodeId)>,
}

impl ReliabilityReport {
    pub fn is_complete(&self) -> bool {
        self.aborted.is_empty()
    }
}

/// Mean and spread of terminal-pair reliability over every ordered pair.
///
/// Counts are enumerated once per pair and reused for all `p_values`. Pairs
/// run in parallel; results are always ordered by `(s, t)`.
pub fn mean_reliability(
    g: &Graph,
    p_values: &[f64],
    weights: &FlowWeights,
    config: &EnumConfig,
) -> Result<ReliabilityReport, ReliabilityError> {
    let n = g.n();
    if n < 2 {
        return Err(ReliabilityError::TooFewNodes);
    }
    if n > MAX_NODES {
        return Err(ReliabilityError::TooManyNodes(n));
    }
    for &p in p_values {
        check_probability(p)?;
    }

    let pairs: Vec<(NodeId, NodeId)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
        .collect();
    let reach: Vec<Vec<bool>> = (0..n).map(|s| g.reachable_from(s)).collect();

    let results: Vec<Result<PairReliability, ReliabilityError>> = pairs
        .par_iter()
        .map(|&(s, t)| {
            let connected = reach[s][t];
            match enumerate_cut_counts_with(g, s, t, config) {
                Ok(counts) => {
                    let values = p_values
                        .iter()
                        .map(|&p| terminal_pair_reliability(&counts, p))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(PairReliability {
                        s,
                        t,
                        connected,
                        min_cut: Some(counts.c()),
                        values: Some(values),
                    })
                }
                Err(ReliabilityError::BudgetExceeded { .. }) => Ok(PairReliability {
                    s,
                    t,
                    connected,
                    min_cut: None,
                    values: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect();
    let per_pair = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let aborted: Vec<_> = per_pair
        .iter()
        .filter(|r| r.values.is_none())
        .map(|r| (r.s, r.t))
        .collect();
    let total = pairs.len() as f64;
    let mut mean = Vec::with_capacity(p_values.len());
    let mut std = Vec::with_capacity(p_values.len());
    for k in 0..p_values.len() {
        if !aborted.is_empty() {
            mean.push(f64::NAN);
            std.push(f64::NAN);
            continue;
        }
        let weighted: Vec<f64> = per_pair
            .iter()
            .map(|r| weights.get(r.s, r.t) * r.values.as_ref().expect("complete")[k])
            .collect();
        let mu = weighted.iter().sum::<f64>() / total;
        let var = weighted.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / total;
        mean.push(mu);
        std.push(var.sqrt());
    }

    Ok(ReliabilityReport {
        n,
        p_values: p_values.to_vec(),
        pairs_connected: per_pair.iter().filter(|r| r.connected).count(),
        pairs_total: pairs.len(),
        per_pair,
        mean,
        std,
        aborted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_link_pair_mean_is_p() {
        let g = Graph::undirected_from_edges(2, [(0, 1)]).unwrap();
        let ps = [0.0, 0.25, 0.5, 1.0];
        let report =
            mean_reliability(&g, &ps, &FlowWeights::uniform(), &EnumConfig::default()).unwrap();
        for (k, &p) in ps.iter().enumerate() {
            assert!((report.mean[k] - p).abs() < 1e-15);
            assert!(report.std[k].abs() < 1e-15);
        }
        assert_eq!((report.pairs_connected, report.pairs_total), (2, 2));
        assert!(report.is_complete());
    }

    #[test]
    fn isolated_vertices_have_zero_mean() {
        let g = Graph::empty(2, false);
        let report = mean_reliability(
            &g,
            &[0.3, 0.9],
            &FlowWeights::uniform(),
            &EnumConfig::default(),
        )
        .unwrap();
        assert_eq!(report.mean, vec![0.0, 0.0]);
        assert_eq!(report.pairs_connected, 0);
    }

    #[test]
    fn weights_scale_pairs() {
        let g = Graph::directed_from_arcs(2, [(0, 1)]).unwrap();
        let mut z = FlowWeights::uniform();
        z.set(0, 1, 0.5).unwrap();
        let report = mean_reliability(&g, &[1.0], &z, &EnumConfig::default()).unwrap();
        // (0.5 * 1 + 1 * 0) / 2
        assert!((report.mean[0] - 0.25).abs() < 1e-15);
        assert_eq!(z.set(0, 1, 1.5), Err(ReliabilityError::BadWeight(1.5)));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let cfg = EnumConfig::default();
        assert_eq!(
            mean_reliability(
                &Graph::empty(1, false),
                &[0.5],
                &FlowWeights::uniform(),
                &cfg
            ),
            Err(ReliabilityError::TooFewNodes)
        );
        assert_eq!(
            mean_reliability(
                &Graph::empty(2, false),
                &[-0.1],
                &FlowWeights::uniform(),
                &cfg
            ),
            Err(ReliabilityError::BadProbability(-0.1))
        );
    }
}
