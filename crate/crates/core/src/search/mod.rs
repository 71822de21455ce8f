//! Best-first (A*) and complete anytime beam search over DP models, with
//! optional constraint propagation during successor generation.

mod astar;
mod cabs;
mod engine;
mod propagation;
mod registry;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{Cost, CostOverflow};
use crate::cp::AdapterError;
use crate::metrics::{NegativeGap, RunMetrics};

pub use astar::astar;
pub use cabs::cabs;
pub use propagation::{gen_succ_propagation, PropagatedSuccessors};
pub use registry::{Insertion, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagationMode {
    Off,
    #[default]
    Once,
    FixPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    TimeLimit,
    MemoryLimit,
    ExpansionLimit,
}

impl Status {
    /// `true` for the statuses that settle the instance.
    pub fn is_proven(self) -> bool {
        matches!(self, Status::Optimal | Status::Infeasible)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveLimits {
    pub time_limit: Option<Duration>,
    /// Approximate bytes of stored search nodes.
    pub memory_limit: Option<usize>,
    pub expansion_cap: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeamConfig {
    pub initial_width: usize,
    pub growth_factor: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            initial_width: 1,
            growth_factor: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incumbent<L> {
    pub cost: u64,
    pub labels: Vec<L>,
}

#[derive(Debug, Clone)]
pub struct SolveResult<L> {
    pub status: Status,
    pub incumbent: Option<Incumbent<L>>,
    /// Bound on the whole objective at the target state.
    pub root_dual: Cost,
    /// Best global bound proven during the run.
    pub best_dual: Cost,
    pub metrics: RunMetrics,
}

impl<L> SolveResult<L> {
    pub fn cost(&self) -> Option<u64> {
        self.incumbent.as_ref().map(|i| i.cost)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    AdapterFailure(#[from] AdapterError),
    #[error(transparent)]
    Overflow(#[from] CostOverflow),
    #[error("propagation mode {0:?} needs an adapter")]
    MissingAdapter(PropagationMode),
    #[error(transparent)]
    NegativeGap(#[from] NegativeGap),
    #[error("beam width must start at 1 or more and grow by at least 2")]
    InvalidBeam,
}
