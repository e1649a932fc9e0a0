//! Exact terminal-pair routing reliability.
//!
//! With every arc failing independently with probability `q = 1 - p`,
//!
//! ```text
//! R_st(p) = 1 - sum_{i=c..m} C_i p^(m-i) (1-p)^i
//! ```
//!
//! where `C_i` counts the arc subsets of size `i` whose failure disconnects
//! `t` from `s` (all of them, not only minimal ones) and `c` is the minimum
//! cut. [`enumerate_cut_counts`] obtains the `C_i` exactly from a recursive
//! merge over supersource states; [`brute_force_reliability`] and
//! [`monte_carlo_reliability`] are independent checks.

mod engine;
mod modular;
mod oracle;
mod report;

use std::fmt;
use std::time::Duration;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use engine::{Deadline, Pruned, StateSpace};
use modular::{crt, moduli_for};

pub use oracle::{
    brute_force_cut_counts, brute_force_reliability, monte_carlo_reliability, BRUTE_FORCE_MAX_ARCS,
};
pub use report::{mean_reliability, FlowWeights, PairReliability, ReliabilityReport};

/// Largest vertex count the state bitsets support.
pub const MAX_NODES: usize = 64;

/// Default per-pair wall-clock budget.
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_millis(60_000);

/// Arc count above which enumeration is considered expensive.
pub const DEFAULT_ARC_BOUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReliabilityError {
    #[error("source and target must differ (both are {0})")]
    SameEndpoints(NodeId),
    #[error("node {node} out of range for {n} nodes")]
    BadNode { node: NodeId, n: usize },
    #[error("graphs with more than {MAX_NODES} nodes are not supported (got {0})")]
    TooManyNodes(usize),
    #[error("probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("brute force needs at most {BRUTE_FORCE_MAX_ARCS} arcs, graph has {0}")]
    TooManyArcs(usize),
    #[error("at least one Monte Carlo trial is required")]
    NoTrials,
    #[error("mean reliability needs at least two nodes")]
    TooFewNodes,
    #[error("flow weight {0} is outside [0, 1]")]
    BadWeight(f64),
    #[error("pair ({s}, {t}) exceeded the {budget_ms} ms compute budget")]
    BudgetExceeded {
        s: NodeId,
        t: NodeId,
        budget_ms: u64,
    },
}

/// Order in which frontier nodes are merged. The result never depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrontierOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumConfig {
    /// Abort a pair once this much wall-clock time has elapsed.
    pub time_budget: Option<Duration>,
    /// Advisory size limit; callers may warn above it.
    pub arc_bound: usize,
    pub order: FrontierOrder,
}

impl Default for EnumConfig {
    fn default() -> Self {
        Self {
            time_budget: Some(DEFAULT_TIME_BUDGET),
            arc_bound: DEFAULT_ARC_BOUND,
            order: FrontierOrder::Ascending,
        }
    }
}

/// Disconnecting arc-subset counts `C_c..C_m` of one `(s, t)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSetCounts {
    m: usize,
    c: usize,
    /// `counts[k]` is `C_{c+k}`.
    counts: Vec<BigUint>,
}

impl CutSetCounts {
    /// Builds counts from the full vector `C_0..C_m`.
    ///
    /// # Panics
    /// If `full.len() != m + 1`.
    pub fn from_full(m: usize, full: Vec<BigUint>) -> Self {
        assert_eq!(full.len(), m + 1, "need C_0..C_m");
        let c = full.iter().position(|x| !x.is_zero()).unwrap_or(m);
        Self {
            m,
            c,
            counts: full[c..].to_vec(),
        }
    }

    /// Number of arcs in the analyzed graph.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Minimum cut size; 0 when the pair is disconnected.
    pub fn c(&self) -> usize {
        self.c
    }

    /// `C_i`, zero below the minimum cut.
    pub fn count(&self, i: usize) -> BigUint {
        if i < self.c || i > self.m {
            BigUint::zero()
        } else {
            self.counts[i - self.c].clone()
        }
    }

    /// `C_c..C_m`.
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn is_connected(&self) -> bool {
        self.c > 0
    }
}

fn check_pair(g: &Graph, s: NodeId, t: NodeId) -> Result<(), ReliabilityError> {
    for node in [s, t] {
        if node >= g.n() {
            return Err(ReliabilityError::BadNode { node, n: g.n() });
        }
    }
    if s == t {
        return Err(ReliabilityError::SameEndpoints(s));
    }
    if g.n() > MAX_NODES {
        return Err(ReliabilityError::TooManyNodes(g.n()));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<(), ReliabilityError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ReliabilityError::BadProbability(p))
    }
}

fn binomial_row(m: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 0..m {
        let next = &row[i] * BigUint::from(m - i) / BigUint::from(i + 1);
        row.push(next);
    }
    row
}

/// Exact `C_i` for the pair `(s, t)` with the default configuration.
pub fn enumerate_cut_counts(
    g: &Graph,
    s: NodeId,
    t: NodeId,
) -> Result<CutSetCounts, ReliabilityError> {
    enumerate_cut_counts_with(g, s, t, &EnumConfig::default())
}

/// Exact `C_i` for the pair `(s, t)`.
pub fn enumerate_cut_counts_with(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    config: &EnumConfig,
) -> Result<CutSetCounts, ReliabilityError> {
    check_pair(g, s, t)?;
    let m = g.arc_count();
    let Some(pruned) = Pruned::new(g, s, t) else {
        // Every arc subset, including the empty one, disconnects.
        return Ok(CutSetCounts::from_full(m, binomial_row(m)));
    };
    let deadline = Deadline::new(config.time_budget, s, t);
    let space = StateSpace::enumerate(pruned.clone(), config.order, &deadline)?;

    // Unrel(q) = sum_j b_j q^j on the pruned arcs. Pruned-away arcs are free,
    // so in the degree-m homogeneous form C_i = sum_j b_j * binom(m - j, i - j).
    let moduli = moduli_for(m);
    let mut residues = vec![Vec::with_capacity(moduli.len()); m + 1];
    for &modulus in &moduli {
        let poly = space.unreliability_poly(modulus, &deadline)?;
        let binom = modulus.binomials(m);
        for (i, slot) in residues.iter_mut().enumerate() {
            let mut acc = 0u128;
            for (j, &b) in poly.iter().enumerate().take(i + 1) {
                if b != 0 {
                    acc = modulus.add(acc, modulus.mul(b, binom[m - j][i - j]));
                }
            }
            slot.push(acc);
        }
    }
    let full = residues.iter().map(|r| crt(r, &moduli)).collect();
    Ok(CutSetCounts::from_full(m, full))
}

/// `R_st` at a single `p`, accumulated directly in floating point by the same
/// state recursion (no counts are materialized).
pub fn reliability_at(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    p: f64,
    config: &EnumConfig,
) -> Result<f64, ReliabilityError> {
    check_pair(g, s, t)?;
    check_probability(p)?;
    let Some(pruned) = Pruned::new(g, s, t) else {
        return Ok(0.0);
    };
    let deadline = Deadline::new(config.time_budget, s, t);
    let space = StateSpace::enumerate(pruned, config.order, &deadline)?;
    Ok(1.0 - space.unreliability_at(1.0 - p, &deadline)?)
}

/// Evaluates `1 - sum C_i p^(m-i) (1-p)^i` in floating point.
pub fn terminal_pair_reliability(counts: &CutSetCounts, p: f64) -> Result<f64, ReliabilityError> {
    check_probability(p)?;
    if !counts.is_connected() {
        return Ok(0.0);
    }
    let q = 1.0 - p;
    let m = counts.m;
    let unrel: f64 = counts
        .counts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let i = counts.c + k;
            c.to_f64().unwrap_or(f64::INFINITY) * p.powi((m - i) as i32) * q.powi(i as i32)
        })
        .sum();
    Ok((1.0 - unrel).clamp(0.0, 1.0))
}

/// `R_st(p)` as exact integer coefficients in powers of `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilityPolynomial {
    /// `coefficients[j]` multiplies `p^j`; no trailing zeros.
    coefficients: Vec<BigInt>,
}

impl ReliabilityPolynomial {
    pub fn from_coefficients(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    /// Coefficient of `p^j`.
    pub fn coefficient(&self, j: usize) -> BigInt {
        self.coefficients.get(j).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    /// Evaluates at `p` in exact rational arithmetic and converts to `f64` at
    /// the end. The conversion is monotone, so exact order between two
    /// polynomials at the same `p` is never inverted.
    pub fn eval(&self, p: f64) -> f64 {
        let Some(d) = self.degree() else {
            return 0.0;
        };
        if p == 0.0 {
            return self.coefficients[0].to_f64().unwrap_or(0.0);
        }
        // p = mantissa / 2^shift exactly.
        let bits = p.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let (mantissa, exp) = if raw_exp == 0 {
            (bits & ((1 << 52) - 1), -1074)
        } else {
            (bits & ((1 << 52) - 1) | 1 << 52, raw_exp - 1075)
        };
        if exp >= 0 {
            // Only reachable for p >= 2^52; fall back to Horner in f64.
            return self
                .coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, a| acc * p + a.to_f64().unwrap_or(0.0));
        }
        let shift = (-exp) as usize;
        let mant = BigInt::from(mantissa);
        let mut acc = self.coefficients[d].clone();
        for j in (0..d).rev() {
            acc = acc * &mant + (&self.coefficients[j] << (shift * (d - j)));
        }
        ratio_to_f64(&acc, shift * d)
    }
}

/// `numerator / 2^denominator_log2`, rounded to `f64`.
fn ratio_to_f64(numerator: &BigInt, denominator_log2: usize) -> f64 {
    if numerator.is_zero() {
        return 0.0;
    }
    let magnitude = numerator.abs();
    let bits = magnitude.bits() as usize;
    let drop = bits.saturating_sub(64);
    let top = (&magnitude >> drop).to_u64().expect("fits in 64 bits") as f64;
    let scaled = top * 2f64.powi(drop as i32 - denominator_log2 as i32);
    if numerator.sign() == Sign::Minus {
        -scaled
    } else {
        scaled
    }
}

impl fmt::Display for ReliabilityPolynomial {
    /// Descending powers, e.g. `-1*p^4 + 2*p^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, a) in self.coefficients.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let magnitude = a.abs();
            if first {
                if a.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if a.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            if j == 0 {
                write!(f, "{magnitude}")?;
            } else {
                write!(f, "{magnitude}*p^{j}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Expands `1 - sum C_i p^(m-i) (1-p)^i` into powers of `p`.
pub fn symbolic_polynomial(counts: &CutSetCounts) -> ReliabilityPolynomial {
    let m = counts.m;
    let mut coeffs = vec![BigInt::zero(); m + 1];
    coeffs[0] = BigInt::one();
    for (k, c) in counts.counts.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let i = counts.c + k;
        let c = BigInt::from(c.clone());
        // (1-p)^i = sum_r binom(i, r) (-1)^r p^r
        let mut binom = BigInt::one();
        for r in 0..=i {
            let term = &c * &binom;
            if r % 2 == 0 {
                coeffs[m - i + r] -= term;
            } else {
                coeffs[m - i + r] += term;
            }
            binom = binom * BigInt::from(i - r) / BigInt::from(r + 1);
        }
    }
    ReliabilityPolynomial::from_coefficients(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn poly(v: &[i64]) -> ReliabilityPolynomial {
        ReliabilityPolynomial::from_coefficients(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn single_arc() {
        let g = Graph::directed_from_arcs(2, [(0, 1)]).unwrap();
        let counts = enumerate_cut_counts(&g, 0, 1).unwrap();
        assert_eq!((counts.m(), counts.c()), (1, 1));
        assert_eq!(counts.counts(), big(&[1]).as_slice());
        assert_eq!(symbolic_polynomial(&counts), poly(&[0, 1]));
        assert_eq!(symbolic_polynomial(&counts).to_string(), "1*p^1");
    }

    #[test]
    fn series_pair() {
        let g = Graph::directed_from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        let counts = enumerate_cut_counts(&g, 0, 2).unwrap();
        assert_eq!(counts, CutSetCounts::from_full(2, big(&[0, 2, 1])));
        assert!((terminal_pair_reliability(&counts, 0.9).unwrap() - 0.81).abs() < 1e-12);
        assert_eq!(symbolic_polynomial(&counts).to_string(), "1*p^2");
    }

    #[test]
    fn diamond_pair() {
        let g = Graph::directed_from_arcs(4, [(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let counts = enumerate_cut_counts(&g, 0, 3).unwrap();
        assert_eq!(counts, CutSetCounts::from_full(4, big(&[0, 0, 4, 4, 1])));
        assert!((terminal_pair_reliability(&counts, 0.5).unwrap() - 0.4375).abs() < 1e-15);
        let r = symbolic_polynomial(&counts);
        assert_eq!(r, poly(&[0, 0, 2, 0, -1]));
        assert_eq!(r.to_string(), "-1*p^4 + 2*p^2");
    }

    #[test]
    fn disconnected_pair_counts_everything() {
        let g = Graph::directed_from_arcs(3, [(1, 0), (1, 2)]).unwrap();
        let counts = enumerate_cut_counts(&g, 0, 2).unwrap();
        assert_eq!(counts.c(), 0);
        assert!(!counts.is_connected());
        assert_eq!(counts.counts(), big(&[1, 2, 1]).as_slice());
        assert_eq!(terminal_pair_reliability(&counts, 0.7).unwrap(), 0.0);
        assert_eq!(symbolic_polynomial(&counts).to_string(), "0");
        assert_eq!(
            reliability_at(&g, 0, 2, 0.7, &EnumConfig::default()),
            Ok(0.0)
        );
    }

    #[test]
    fn boundary_probabilities() {
        let g = Graph::directed_from_arcs(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let counts = enumerate_cut_counts(&g, 0, 2).unwrap();
        assert_eq!(terminal_pair_reliability(&counts, 1.0), Ok(1.0));
        assert_eq!(terminal_pair_reliability(&counts, 0.0), Ok(0.0));
        let r = symbolic_polynomial(&counts);
        assert_eq!(r.eval(0.0), 0.0);
        assert_eq!(r.eval(1.0), 1.0);
    }

    #[test]
    fn argument_errors() {
        let g = Graph::directed_from_arcs(2, [(0, 1)]).unwrap();
        assert_eq!(
            enumerate_cut_counts(&g, 1, 1),
            Err(ReliabilityError::SameEndpoints(1))
        );
        assert_eq!(
            enumerate_cut_counts(&g, 0, 2),
            Err(ReliabilityError::BadNode { node: 2, n: 2 })
        );
        let counts = enumerate_cut_counts(&g, 0, 1).unwrap();
        assert_eq!(
            terminal_pair_reliability(&counts, 1.5),
            Err(ReliabilityError::BadProbability(1.5))
        );
        assert!(matches!(
            terminal_pair_reliability(&counts, f64::NAN),
            Err(ReliabilityError::BadProbability(_))
        ));
    }

    #[test]
    fn exact_evaluation_handles_cancellation() {
        // (1 - p)^40 expanded has coefficients near 1e11 with alternating signs.
        let mut coeffs = vec![BigInt::zero(); 41];
        let mut binom = BigInt::one();
        for (r, coeff) in coeffs.iter_mut().enumerate() {
            *coeff = if r % 2 == 0 {
                binom.clone()
            } else {
                -binom.clone()
            };
            binom = binom * BigInt::from(40 - r) / BigInt::from(r + 1);
        }
        let r = ReliabilityPolynomial::from_coefficients(coeffs);
        let expected = 0.1f64.powi(40);
        assert!((r.eval(0.9) - expected).abs() / expected < 1e-12);
    }
}
