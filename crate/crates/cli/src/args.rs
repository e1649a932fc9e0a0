use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use relyroute_core::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "relyroute",
    version,
    about = "Tree-routing overlays and their exact routing reliability"
)]
pub struct Cli {
    /// Per-pair compute budget for reliability enumeration, in milliseconds.
    #[arg(
        long,
        global = true,
        env = "RELYROUTE_TIME_BUDGET_MS",
        default_value_t = 60_000
    )]
    pub time_budget_ms: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a topology: random unit-disk, full mesh, or a bundled fixture.
    Gen(GenArgs),
    /// Build routing tables on a topology and write the overlay graph.
    Overlay(OverlayArgs),
    /// Mean terminal-pair reliability of a graph over a grid of p values.
    Reliability(ReliabilityArgs),
    /// Run both routing modes on one topology and tabulate their reliability.
    Compare(CompareArgs),
}

/// Parameters of a random unit-disk topology.
#[derive(Debug, Clone, Args)]
pub struct GeometricArgs {
    /// Number of nodes of a random topology.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Node density in nodes per km².
    #[arg(long, default_value_t = 64.0)]
    pub density: f64,
    /// Transmission range in meters.
    #[arg(long, default_value_t = relyroute_core::topology::DEFAULT_RANGE_M)]
    pub range: f64,
    /// Seed for node placement; retries continue from seed + 1.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub geometric: GeometricArgs,
    /// Full mesh on this many nodes.
    #[arg(long, conflicts_with_all = ["nodes", "fixture"])]
    pub mesh: Option<usize>,
    /// Bundled fixture (`fig2`): physical, dart and atr matrices.
    #[arg(long, conflicts_with = "nodes", requires = "out_dir")]
    pub fixture: Option<Fixture>,
    /// Matrix output file; a `.scenario` sidecar with node positions is written
    /// next to it for random topologies. Standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output directory for fixtures.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fixture {
    Fig2,
}

/// Address allocation and routing parameters.
#[derive(Debug, Clone, Args)]
pub struct RoutingArgs {
    /// Node that receives the all-zeros address.
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    /// Address length; defaults to ceil(log2 n) + 2.
    #[arg(long)]
    pub bits: Option<u32>,
}

#[derive(Debug, Args)]
pub struct OverlayArgs {
    /// Physical topology (adjacency matrix file).
    #[arg(long)]
    pub topo: PathBuf,
    #[arg(long, value_parser = Mode::from_str)]
    pub mode: Mode,
    #[command(flatten)]
    pub routing: RoutingArgs,
    /// Overlay matrix output file. Standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every discovered path, one per line.
    #[arg(long)]
    pub dump_paths: Option<PathBuf>,
    /// Write the address map.
    #[arg(long)]
    pub addr_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReliabilityArgs {
    /// Graph to analyze (adjacency matrix file).
    #[arg(long)]
    pub graph: PathBuf,
    /// `start:stop:step` with inclusive endpoints, or a single value.
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub p_grid: PGrid,
    /// Restrict to one ordered pair `s,t`.
    #[arg(long)]
    pub pair: Option<Pair>,
    /// With `--pair`, print the exact reliability polynomial.
    #[arg(long, requires = "pair")]
    pub symbolic: bool,
    /// CSV output file. Standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-pair `s,t,p,R_st` CSV.
    #[arg(long)]
    pub pairs_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Physical topology file.
    #[arg(long, conflicts_with_all = ["mesh", "nodes"])]
    pub topo: Option<PathBuf>,
    /// Full mesh on this many nodes.
    #[arg(long, conflicts_with = "nodes")]
    pub mesh: Option<usize>,
    #[command(flatten)]
    pub geometric: GeometricArgs,
    #[command(flatten)]
    pub routing: RoutingArgs,
    #[arg(long, default_value = "0.05:0.95:0.05")]
    pub p_grid: PGrid,
    /// CSV output file. Standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Probability grid with inclusive endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PGrid {
    pub spec: String,
    pub values: Vec<f64>,
}

impl FromStr for PGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<f64, String> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
        };
        let (start, stop, step) = match parts.as_slice() {
            [single] => {
                let v = num(single)?;
                (v, v, 1.0)
            }
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err("expected start:stop:step".into()),
        };
        if !(0.0 <= start && start <= stop && stop <= 1.0) {
            return Err(format!("need 0 <= start <= stop <= 1, got {start}:{stop}"));
        }
        if step <= 0.0 || !step.is_finite() {
            return Err(format!("step must be positive, got {step}"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Snap to 12 decimals so 0.05 + 2 * 0.05 prints as 0.15.
        let values = (0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect();
        Ok(PGrid {
            spec: s.to_string(),
            values,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub s: usize,
    pub t: usize,
}

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(',').ok_or("expected s,t")?;
        let id = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a node id"))
        };
        Ok(Pair {
            s: id(a)?,
            t: id(b)?,
        })
    }
}
