use std::path::PathBuf;

use relyroute_core::{AddressError, GraphError, ReliabilityError, RoutingError, TopologyError};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: GraphError },
    #[error("address allocation failed: {0}")]
    Address(#[from] AddressError),
    #[error("topology generation failed: {0}")]
    Topology(#[from] TopologyError),
    #[error("routing failed: {0}")]
    Routing(#[from] RoutingError),
    #[error("reliability failed: {0}")]
    Reliability(#[from] ReliabilityError),
    /// Output was written but some pairs ran out of compute budget.
    #[error("{0} pair(s) exceeded the compute budget")]
    Budget(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Topology(TopologyError::NoNodes)
            | CliError::Topology(TopologyError::BadDensity(_))
            | CliError::Topology(TopologyError::BadRange(_)) => EXIT_USAGE,
            CliError::Reliability(ReliabilityError::BudgetExceeded { .. })
            | CliError::Budget(_) => EXIT_BUDGET,
            CliError::Reliability(ReliabilityError::SameEndpoints(_))
            | CliError::Reliability(ReliabilityError::BadNode { .. })
            | CliError::Reliability(ReliabilityError::BadProbability(_)) => EXIT_USAGE,
            _ => EXIT_INPUT,
        }
    }
}
