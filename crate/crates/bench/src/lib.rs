//! Inputs shared by the benchmarks.

use relyroute_core::addressing::default_bits;
use relyroute_core::{
    allocate_addresses, build_tables, connected_or_retry, overlay_graph, Graph, Mode,
};

/// Physical graph and overlay for the first seed at or after `seed` whose
/// 16-node topology allocates with the default address width.
pub fn sixteen_node_overlay(seed: u64, mode: Mode) -> (Graph, Graph) {
    let mut seed = seed;
    loop {
        let (g, _, _) = connected_or_retry(16, 64.0, 250.0, seed).expect("connected topology");
        if let Ok(addrs) = allocate_addresses(&g, 0, default_bits(16)) {
            let tables = build_tables(&g, &addrs, mode).expect("tables");
            let overlay = overlay_graph(&tables, &g, &addrs).expect("overlay");
            return (g, overlay);
        }
        seed += 1;
    }
}
