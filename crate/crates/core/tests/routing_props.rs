use proptest::prelude::*;
use relyroute_core::addressing::default_bits;
use relyroute_core::routing::overlay_graph_enumerated;
use relyroute_core::*;

/// A connected unit-disk topology with a complete default-width allocation.
fn allocated_topology() -> impl Strategy<Value = (Graph, AddressMap)> {
    (3usize..=10, 30.0f64..90.0, any::<u64>(), any::<bool>()).prop_filter_map(
        "allocation exhausted or never connected",
        |(n, density, seed, wide)| {
            let (g, _, _) = connected_or_retry(n, density, 250.0, seed).ok()?;
            let root = (seed % n as u64) as usize;
            let bits = default_bits(n) + u32::from(wide);
            let addrs = allocate_addresses(&g, root, bits).ok()?;
            Some((g, addrs))
        },
    )
}

fn symmetric_digraph() -> impl Strategy<Value = Graph> {
    (2usize..=7).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        proptest::sample::subsequence(pairs.clone(), 0..=pairs.len())
            .prop_map(move |edges| Graph::undirected_from_edges(n, edges).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dart_paths_are_unique_and_simple((g, addrs) in allocated_topology()) {
        let tables = build_tables(&g, &addrs, Mode::Dart).unwrap();
        for s in 0..g.n() {
            for t in (0..g.n()).filter(|&t| t != s) {
                let set = discover_paths(&tables, &g, &addrs, s, t).unwrap();
                prop_assert_eq!(set.paths.len(), 1);
                let path = &set.paths[0];
                prop_assert_eq!((path[0], *path.last().unwrap()), (s, t));
                let mut seen = path.clone();
                seen.sort_unstable();
                seen.dedup();
                prop_assert_eq!(seen.len(), path.len());
                for hop in path.windows(2) {
                    prop_assert!(g.has_arc(hop[0], hop[1]));
                }
            }
        }
    }

    #[test]
    fn atr_paths_are_loop_free((g, addrs) in allocated_topology()) {
        let tables = build_tables(&g, &addrs, Mode::Atr).unwrap();
        for s in 0..g.n() {
            for t in (0..g.n()).filter(|&t| t != s) {
                let set = discover_paths(&tables, &g, &addrs, s, t).unwrap();
                prop_assert!(!set.truncated);
                prop_assert!(!set.paths.is_empty());
                for path in &set.paths {
                    let mut seen = path.clone();
                    seen.sort_unstable();
                    seen.dedup();
                    prop_assert_eq!(seen.len(), path.len());
                    prop_assert_eq!(*path.last().unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn overlays_nest((g, addrs) in allocated_topology()) {
        let dart_tables = build_tables(&g, &addrs, Mode::Dart).unwrap();
        let atr_tables = build_tables(&g, &addrs, Mode::Atr).unwrap();
        let dart = overlay_graph(&dart_tables, &g, &addrs).unwrap();
        let atr = overlay_graph(&atr_tables, &g, &addrs).unwrap();
        prop_assert!(dart.is_subgraph_of(&atr));
        prop_assert!(atr.is_subgraph_of(&g.as_directed()));
        for u in 0..g.n() {
            prop_assert!(dart.out_neighbors(u).len() <= addrs.bits() as usize);
            for k in 0..addrs.bits() {
                if let Some(entry) = dart_tables.entry(u, k) {
                    prop_assert!(entry.next_hops.len() <= 1);
                }
            }
        }
    }

    #[test]
    fn arcwise_overlay_matches_enumeration((g, addrs) in allocated_topology()) {
        for mode in [Mode::Dart, Mode::Atr] {
            let tables = build_tables(&g, &addrs, mode).unwrap();
            prop_assert_eq!(
                overlay_graph(&tables, &g, &addrs).unwrap(),
                overlay_graph_enumerated(&tables, &g, &addrs).unwrap()
            );
        }
    }

    #[test]
    fn allocation_is_injective_and_partitions((g, addrs) in allocated_topology()) {
        let root = addrs.root();
        prop_assert_eq!(addrs.addr(root).value(), 0);
        let mut values: Vec<u64> = addrs.addresses().iter().map(|a| a.value()).collect();
        values.sort_unstable();
        values.dedup();
        prop_assert_eq!(values.len(), g.n());
        for v in 0..g.n() {
            let mut covered: Vec<NodeId> =
                (0..addrs.bits()).flat_map(|k| addrs.sibling_subtree(v, k)).collect();
            covered.sort_unstable();
            let others: Vec<NodeId> = (0..g.n()).filter(|&w| w != v).collect();
            prop_assert_eq!(covered, others);
        }
        let text = addrs.to_text();
        prop_assert_eq!(AddressMap::from_text(&text).unwrap(), addrs);
    }

    #[test]
    fn matrix_round_trip(g in symmetric_digraph(), directed in any::<bool>()) {
        let g = if directed { g.as_directed() } else { g };
        let text = serialize_adjacency_matrix(&g);
        prop_assert_eq!(parse_adjacency_matrix(&text).unwrap(), g);
    }

    #[test]
    fn min_cut_is_symmetric_and_tracks_connectivity(g in symmetric_digraph(), a in 0usize..7, b in 0usize..7) {
        let n = g.n();
        let (s, t) = (a % n, b % n);
        prop_assume!(s != t);
        let st = min_cut_size(&g, s, t).unwrap();
        prop_assert_eq!(st, min_cut_size(&g, t, s).unwrap());
        prop_assert_eq!(st == 0, !is_connected(&g, s, t).unwrap());
    }
}

#[test]
fn dart_can_miss_the_shortest_route() {
    let k4 = topology::full_mesh(4).unwrap();
    let addrs = allocate_addresses(&k4, 0, 2).unwrap();
    let tables = build_tables(&k4, &addrs, Mode::Dart).unwrap();
    let longer = (0..4)
        .flat_map(|s| (0..4).filter(move |&t| t != s).map(move |t| (s, t)))
        .find(|&(s, t)| discover_paths(&tables, &k4, &addrs, s, t).unwrap().paths[0].len() > 2);
    // Every pair of K4 is one hop apart, yet 0 reaches 3 through 2.
    assert_eq!(longer, Some((0, 3)));
    let atr = build_tables(&k4, &addrs, Mode::Atr).unwrap();
    let set = discover_paths(&atr, &k4, &addrs, 0, 3).unwrap();
    assert!(set.paths.contains(&vec![0, 3]));
}

#[test]
fn two_nodes_share_one_link() {
    let g = topology::full_mesh(2).unwrap();
    let addrs = allocate_addresses(&g, 0, 1).unwrap();
    for mode in [Mode::Dart, Mode::Atr] {
        let tables = build_tables(&g, &addrs, mode).unwrap();
        let overlay = overlay_graph(&tables, &g, &addrs).unwrap();
        assert!(overlay.has_arc(0, 1) && overlay.has_arc(1, 0));
        assert_eq!(overlay.arc_count(), 2);
    }
}
