//! Physical topology generators: full meshes, unit-disk random geometric
//! graphs at a fixed node density, and the bundled 8-node fixture.
//!
//! Random placement uses `ChaCha8Rng::seed_from_u64(seed)`; node `i` takes
//! the `2i`-th and `(2i+1)`-th `f64` draws as `x / side` and `y / side`.
//! This mapping is frozen so that golden files stay valid.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{parse_adjacency_matrix, Graph};

/// Default transmission radius in meters.
pub const DEFAULT_RANGE_M: f64 = 250.0;

/// Attempts made by [`connected_or_retry`] before giving up.
pub const MAX_CONNECT_ATTEMPTS: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("node count must be at least 1")]
    NoNodes,
    #[error("density must be positive, got {0}")]
    BadDensity(f64),
    #[error("transmission range must be positive, got {0}")]
    BadRange(f64),
    #[error("no connected topology after {attempts} attempts starting at seed {seed}")]
    NeverConnected { seed: u64, attempts: u32 },
}

/// Node placement behind a generated unit-disk graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricScenario {
    pub n: usize,
    /// Nodes per km².
    pub density: f64,
    pub range_m: f64,
    pub seed: u64,
    pub side_m: f64,
    /// `(x, y)` in meters, inside `[0, side_m]²`.
    pub positions: Vec<(f64, f64)>,
}

impl GeometricScenario {
    /// Sidecar text: a `#` header echoing the parameters, then `id x_m y_m`.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# n={} density={} range_m={} seed={} side_m={}",
            self.n, self.density, self.range_m, self.seed, self.side_m
        );
        for (id, (x, y)) in self.positions.iter().enumerate() {
            let _ = writeln!(out, "{id} {x} {y}");
        }
        out
    }
}

/// Side of the square deployment area, in meters, for `n` nodes at `density`
/// nodes per km².
pub fn deployment_side_m(n: usize, density: f64) -> f64 {
    (n as f64 / density).sqrt() * 1000.0
}

/// Undirected complete graph on `n` vertices.
pub fn full_mesh(n: usize) -> Result<Graph, TopologyError> {
    if n == 0 {
        return Err(TopologyError::NoNodes);
    }
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Ok(Graph::undirected_from_edges(n, edges).expect("complete graph is simple"))
}

/// Unit-disk graph over `n` uniform points in a square sized for `density`.
pub fn random_geometric(
    n: usize,
    density: f64,
    range_m: f64,
    seed: u64,
) -> Result<(Graph, GeometricScenario), TopologyError> {
    if n == 0 {
        return Err(TopologyError::NoNodes);
    }
    if density <= 0.0 || !density.is_finite() {
        return Err(TopologyError::BadDensity(density));
    }
    if range_m <= 0.0 || !range_m.is_finite() {
        return Err(TopologyError::BadRange(range_m));
    }

    let side_m = deployment_side_m(n, density);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let x = rng.gen::<f64>() * side_m;
            let y = rng.gen::<f64>() * side_m;
            (x, y)
        })
        .collect();

    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (dx, dy) = (
                positions[i].0 - positions[j].0,
                positions[i].1 - positions[j].1,
            );
            if dx.hypot(dy) <= range_m {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::undirected_from_edges(n, edges).expect("unit-disk graph is simple");
    Ok((
        g,
        GeometricScenario {
            n,
            density,
            range_m,
            seed,
            side_m,
            positions,
        },
    ))
}

/// Retries [`random_geometric`] with seeds `seed, seed + 1, ...` until the
/// graph is connected. Returns the graph, its scenario and the attempt count.
pub fn connected_or_retry(
    n: usize,
    density: f64,
    range_m: f64,
    seed: u64,
) -> Result<(Graph, GeometricScenario, u32), TopologyError> {
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let (g, scenario) =
            random_geometric(n, density, range_m, seed.wrapping_add(attempt as u64))?;
        if g.is_strongly_connected() {
            return Ok((g, scenario, attempt + 1));
        }
    }
    Err(TopologyError::NeverConnected {
        seed,
        attempts: MAX_CONNECT_ATTEMPTS,
    })
}

/// Mean out-degree.
pub fn mean_degree(g: &Graph) -> f64 {
    if g.n() == 0 {
        0.0
    } else {
        g.arc_count() as f64 / g.n() as f64
    }
}

/// Physical adjacency matrix of the 8-node fixture network.
pub const FIG2_PHYSICAL: &str = "\
8 undirected
0 1 0 0 0 0 1 0
1 0 0 0 1 1 1 1
0 0 0 1 1 0 1 0
0 0 1 0 1 0 1 0
0 1 1 1 0 1 1 1
0 1 0 0 1 0 1 1
1 1 1 1 1 1 0 1
0 1 0 0 1 1 1 0
";

/// Shortest-path (DART) overlay of the fixture network. Not symmetric.
pub const FIG2_DART: &str = "\
8 directed
0 1 0 0 0 0 1 0
1 0 0 0 1 1 0 1
0 0 0 1 1 0 1 0
0 0 1 0 1 0 1 0
0 1 0 0 0 0 1 0
0 1 0 0 1 0 1 0
1 1 1 0 0 0 0 0
0 1 0 0 1 1 1 0
";

/// Multi-path (ATR) overlay of the fixture network; equal to the physical one.
pub const FIG2_ATR: &str = "\
8 undirected
0 1 0 0 0 0 1 0
1 0 0 0 1 1 1 1
0 0 0 1 1 0 1 0
0 0 1 0 1 0 1 0
0 1 1 1 0 1 1 1
0 1 0 0 1 0 1 1
1 1 1 1 1 1 0 1
0 1 0 0 1 1 1 0
";

/// The fixture triple `(physical, dart_overlay, atr_overlay)`.
pub fn fixture_fig2() -> (Graph, Graph, Graph) {
    let parse = |text: &str| parse_adjacency_matrix(text).expect("bundled fixture parses");
    (parse(FIG2_PHYSICAL), parse(FIG2_DART), parse(FIG2_ATR))
}
