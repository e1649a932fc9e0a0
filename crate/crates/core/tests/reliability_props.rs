use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;
use relyroute_core::reliability::{enumerate_cut_counts_with, reliability_at, FrontierOrder};
use relyroute_core::*;

const GRID: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Random simple graph on 2..=8 vertices with at most 14 arcs.
fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=8, any::<bool>()).prop_flat_map(|(n, directed)| {
        let pairs: Vec<(usize, usize)> = if directed {
            (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect()
        } else {
            (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect()
        };
        let limit = if directed { 14 } else { 7 };
        proptest::sample::subsequence(pairs.clone(), 0..=limit.min(pairs.len())).prop_map(
            move |chosen| {
                if directed {
                    Graph::directed_from_arcs(n, chosen).unwrap()
                } else {
                    Graph::undirected_from_edges(n, chosen).unwrap()
                }
            },
        )
    })
}

fn graph_and_pair() -> impl Strategy<Value = (Graph, usize, usize)> {
    small_graph().prop_flat_map(|g| {
        let n = g.n();
        (Just(g), 0..n, 1..n).prop_map(move |(g, s, d)| (g, s, (s + d) % n))
    })
}

fn binomial(m: usize, i: usize) -> BigUint {
    (0..i).fold(BigUint::one(), |acc, k| {
        acc * BigUint::from(m - k) / BigUint::from(k + 1)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exact_matches_brute_force((g, s, t) in graph_and_pair()) {
        let counts = enumerate_cut_counts(&g, s, t).unwrap();
        let brute = brute_force_cut_counts(&g, s, t).unwrap();
        for (i, &b) in brute.iter().enumerate() {
            prop_assert_eq!(counts.count(i), BigUint::from(b));
        }
        for p in GRID {
            let exact = terminal_pair_reliability(&counts, p).unwrap();
            let oracle = brute_force_reliability(&g, s, t, p).unwrap();
            prop_assert!((exact - oracle).abs() <= 1e-12, "p={} exact={} oracle={}", p, exact, oracle);
        }
    }

    #[test]
    fn polynomial_agrees_with_counts((g, s, t) in graph_and_pair()) {
        let counts = enumerate_cut_counts(&g, s, t).unwrap();
        let poly = symbolic_polynomial(&counts);
        for p in GRID {
            let a = poly.eval(p);
            let b = terminal_pair_reliability(&counts, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn numeric_branch_agrees((g, s, t) in graph_and_pair()) {
        let counts = enumerate_cut_counts(&g, s, t).unwrap();
        for p in GRID {
            let direct = reliability_at(&g, s, t, p, &EnumConfig::default()).unwrap();
            let via_counts = terminal_pair_reliability(&counts, p).unwrap();
            prop_assert!((direct - via_counts).abs() <= 1e-12);
        }
    }

    #[test]
    fn smallest_cut_is_min_cut((g, s, t) in graph_and_pair()) {
        let counts = enumerate_cut_counts(&g, s, t).unwrap();
        let first = (0..=counts.m()).find(|&i| !counts.count(i).is_zero()).unwrap();
        prop_assert_eq!(first, min_cut_size(&g, s, t).unwrap());
        prop_assert_eq!(counts.c(), first);
    }

    #[test]
    fn counts_are_bounded((g, s, t) in graph_and_pair()) {
        let counts = enumerate_cut_counts(&g, s, t).unwrap();
        let m = counts.m();
        let mut total = BigUint::zero();
        for i in 0..=m {
            prop_assert!(counts.count(i) <= binomial(m, i));
            total += counts.count(i);
        }
        prop_assert!(total <= BigUint::one() << m);
        prop_assert_eq!(counts.count(m), BigUint::one());
    }

    #[test]
    fn frontier_order_is_irrelevant((g, s, t) in graph_and_pair()) {
        let asc = enumerate_cut_counts(&g, s, t).unwrap();
        let cfg = EnumConfig { order: FrontierOrder::Descending, ..EnumConfig::default() };
        let desc = enumerate_cut_counts_with(&g, s, t, &cfg).unwrap();
        prop_assert_eq!(asc, desc);
    }

    #[test]
    fn nondecreasing_in_p((g, s, t) in graph_and_pair()) {
        let counts = enumerate_cut_counts(&g, s, t).unwrap();
        let mut prev = terminal_pair_reliability(&counts, 0.0).unwrap();
        for k in 1..=99 {
            let r = terminal_pair_reliability(&counts, k as f64 / 100.0).unwrap();
            prop_assert!(r + 1e-12 >= prev);
            prop_assert!((0.0..=1.0).contains(&r));
            prev = r;
        }
    }

    #[test]
    fn boundary_values((g, s, t) in graph_and_pair()) {
        let counts = enumerate_cut_counts(&g, s, t).unwrap();
        let r0 = terminal_pair_reliability(&counts, 0.0).unwrap();
        let r1 = terminal_pair_reliability(&counts, 1.0).unwrap();
        prop_assert_eq!(r0, 0.0);
        if is_connected(&g, s, t).unwrap() {
            prop_assert_eq!(r1, 1.0);
        } else {
            prop_assert_eq!(r1, 0.0);
            for p in GRID {
                prop_assert_eq!(terminal_pair_reliability(&counts, p).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn more_arcs_never_hurt((g, s, t) in graph_and_pair(), extra in any::<u64>()) {
        // Add one missing arc (if any) and compare.
        let n = g.n();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !g.has_arc(i, j))
            .collect();
        prop_assume!(!missing.is_empty());
        let add = missing[(extra % missing.len() as u64) as usize];
        let mut arcs: Vec<_> = g.arcs().collect();
        arcs.push(add);
        let bigger = Graph::directed_from_arcs(n, arcs).unwrap();
        let small = enumerate_cut_counts(&g.as_directed(), s, t).unwrap();
        let large = enumerate_cut_counts(&bigger, s, t).unwrap();
        for p in GRID {
            let a = terminal_pair_reliability(&small, p).unwrap();
            let b = terminal_pair_reliability(&large, p).unwrap();
            prop_assert!(b + 1e-12 >= a);
        }
    }
}

#[test]
fn closed_forms() {
    let single = Graph::directed_from_arcs(2, [(0, 1)]).unwrap();
    let series = Graph::directed_from_arcs(3, [(0, 1), (1, 2)]).unwrap();
    let diamond = Graph::directed_from_arcs(4, [(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
    let poly =
        |g: &Graph, t| symbolic_polynomial(&enumerate_cut_counts(g, 0, t).unwrap()).to_string();
    assert_eq!(poly(&single, 1), "1*p^1");
    assert_eq!(poly(&series, 2), "1*p^2");
    assert_eq!(poly(&diamond, 3), "-1*p^4 + 2*p^2");
    assert_eq!(
        brute_force_reliability(&diamond, 0, 3, 0.5).unwrap(),
        0.4375
    );
}

#[test]
fn wide_graph_needs_more_than_128_bits() {
    // K12 as a symmetric digraph has 132 arcs, too many for one 128-bit residue.
    let g = topology::full_mesh(12).unwrap();
    let counts = enumerate_cut_counts(&g, 0, 11).unwrap();
    assert_eq!(counts.m(), 132);
    assert_eq!(counts.c(), 11);
    assert_eq!(counts.count(132), BigUint::one());
    assert!(counts.count(66) > BigUint::one() << 100);
    // Only the source's out-star and the target's in-star have eleven arcs.
    assert_eq!(counts.count(11), BigUint::from(2u32));
    for i in 0..=132 {
        assert!(counts.count(i) <= binomial(132, i));
    }
    let p = 0.5;
    let exact = terminal_pair_reliability(&counts, p).unwrap();
    let direct = reliability_at(&g, 0, 11, p, &EnumConfig::default()).unwrap();
    assert!((exact - direct).abs() < 1e-12);
}
