//! Routing reliability of tree-based dynamic addressing.
//!
//! The crate builds the overlay graphs that shortest-path (DART-style) and
//! multi-path (ATR-style) tree routing induce on a physical topology, then
//! computes exact terminal-pair and mean network reliability as a function of
//! a uniform link success probability `p`.
//!
//! Pipeline:
//!
//! 1. [`topology`] generates or loads a physical [`Graph`].
//! 2. [`addressing`] assigns tree addresses from a root.
//! 3. [`routing`] fills per-level routing tables and extracts the overlay.
//! 4. [`reliability`] counts disconnecting arc subsets per pair and evaluates
//!    reliability numerically or as an exact polynomial.

pub mod addressing;
pub mod format;
pub mod graph;
pub mod reliability;
pub mod routing;
pub mod topology;

pub use addressing::{allocate_addresses, level_of_divergence, Address, AddressError, AddressMap};
pub use graph::{
    is_connected, min_cut_size, parse_adjacency_matrix, serialize_adjacency_matrix, Graph,
    GraphError, LinkModel, NodeId,
};
pub use reliability::{
    brute_force_cut_counts, brute_force_reliability, enumerate_cut_counts, mean_reliability,
    monte_carlo_reliability, symbolic_polynomial, terminal_pair_reliability, CutSetCounts,
    EnumConfig, FlowWeights, ReliabilityError, ReliabilityPolynomial, ReliabilityReport,
};
pub use routing::{
    build_tables, discover_paths, overlay_graph, Mode, PathSet, RouteEntry, RoutingError,
    RoutingTables,
};
pub use topology::{
    connected_or_retry, fixture_fig2, full_mesh, random_geometric, GeometricScenario, TopologyError,
};
