//! Solving one loaded instance with a chosen configuration.

use std::time::Duration;

use clap::ValueEnum;
use dpcp_core::io::Instance;
use dpcp_core::metrics::RunMetrics;
use dpcp_core::models::rcpsp::{RcpspAdapter, RcpspModel, RcpspOptions};
use dpcp_core::models::smswt::{SmsAdapter, SmsModel};
use dpcp_core::models::tsptw::{TsptwAdapter, TsptwModel};
use dpcp_core::models::InstanceError;
use dpcp_core::search::{
    astar, cabs, BeamConfig, PropagationMode, SearchError, SolveLimits, SolveResult, Status,
};
use dpcp_core::{Cost, DpModel};
use dpcp_core::cp::PropagationAdapter;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Astar,
    #[default]
    Cabs,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Astar => "astar",
            Algo::Cabs => "cabs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Off,
    #[default]
    Once,
    Fixpoint,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Off => "off",
            Mode::Once => "once",
            Mode::Fixpoint => "fixpoint",
        }
    }
}

impl From<Mode> for PropagationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Off => PropagationMode::Off,
            Mode::Once => PropagationMode::Once,
            Mode::Fixpoint => PropagationMode::FixPoint,
        }
    }
}

/// Limits as given on the command line or in a manifest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    /// Seconds.
    pub time_limit: Option<f64>,
    /// Megabytes.
    pub mem_limit: Option<usize>,
    pub expansion_cap: Option<u64>,
}

impl Limits {
    pub fn to_solver(self) -> Result<SolveLimits, RunError> {
        let time_limit = match self.time_limit {
            Some(t) if !t.is_finite() || t < 0.0 => return Err(RunError::Usage(format!("bad time limit {t}"))),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        Ok(SolveLimits {
            time_limit,
            memory_limit: self.mem_limit.map(|mb| mb.saturating_mul(1 << 20)),
            expansion_cap: self.expansion_cap,
        })
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    pub cost: Option<u64>,
    pub gap: f64,
    pub root_dual: Option<u64>,
    pub best_dual: Option<u64>,
    pub metrics: RunMetrics,
    /// Labels of the incumbent in transition order.
    pub solution: Option<Vec<usize>>,
}

impl Report {
    fn from_result(r: SolveResult<usize>) -> Self {
        Report {
            status: r.status,
            cost: r.cost(),
            gap: r.metrics.final_gap,
            root_dual: r.root_dual.finite(),
            best_dual: match (r.status, r.best_dual) {
                (Status::Infeasible, _) | (_, Cost::Infinity) => None,
                (_, d) => d.finite(),
            },
            solution: r.incumbent.map(|i| i.labels),
            metrics: r.metrics,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub algo: Algo,
    pub mode: Mode,
    pub limits: SolveLimits,
}

fn search<M, A>(model: &M, adapter: A, cfg: &RunConfig) -> Result<Report, RunError>
where
    M: DpModel<Label = usize>,
    A: PropagationAdapter<M>,
{
    let mode = PropagationMode::from(cfg.mode);
    let mut adapter = adapter;
    let adapter = (mode != PropagationMode::Off).then_some(&mut adapter);
    let result = match cfg.algo {
        Algo::Astar => astar(model, adapter, &cfg.limits, mode)?,
        Algo::Cabs => cabs(model, adapter, &cfg.limits, &BeamConfig::default(), mode)?,
    };
    Ok(Report::from_result(result))
}

pub fn solve(inst: &Instance, cfg: &RunConfig) -> Result<Report, RunError> {
    match inst {
        Instance::Smswt(i) => {
            let m = SmsModel::new(i.clone())?;
            search(&m, SmsAdapter::new(&m), cfg)
        }
        Instance::Rcpsp(i) => {
            let m = RcpspModel::new(i.clone(), RcpspOptions::default())?;
            search(&m, RcpspAdapter::new(&m), cfg)
        }
        Instance::Tsptw(i) => {
            let m = TsptwModel::new(i.clone())?;
            search(&m, TsptwAdapter::new(&m), cfg)
        }
    }
}
