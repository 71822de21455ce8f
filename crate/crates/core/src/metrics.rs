//! Run counters, anytime traces and the optimality gap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::Cost;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Non-base pops that were not lazily skipped and not pruned by propagation.
    pub expansions: u64,
    pub generated: u64,
    pub base_pops: u64,
    pub stale_skips: u64,
    /// Popped states discarded by the propagation check before expansion.
    pub pruned_by_cp: u64,
    pub propagation_calls: u64,
    /// Seconds spent building and propagating constraint models.
    pub propagation_time: f64,
    /// `(seconds, cost)` of every improving incumbent.
    pub incumbent_trace: Vec<(f64, u64)>,
    /// `(seconds, bound)` of every improving global dual bound.
    pub dual_trace: Vec<(f64, u64)>,
    pub final_gap: f64,
    /// Width of every beam pass that was started (beam search only).
    pub beam_widths: Vec<usize>,
    pub wall_time: f64,
}

impl RunMetrics {
    pub(crate) fn push_incumbent(&mut self, at: f64, cost: u64) {
        if self.incumbent_trace.last().is_none_or(|&(_, c)| cost < c) {
            self.incumbent_trace.push((at, cost));
        }
    }

    pub(crate) fn push_dual(&mut self, at: f64, bound: Cost) {
        if let Cost::Finite(b) = bound {
            if self.dual_trace.last().is_none_or(|&(_, d)| b > d) {
                self.dual_trace.push((at, b));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dual bound {dual} exceeds primal bound {primal}")]
pub struct NegativeGap {
    pub primal: u64,
    pub dual: Cost,
}

/// `(primal - dual) / max(1, primal)`, or 1.0 without a primal bound.
pub fn optimality_gap(primal: Option<u64>, dual: Cost) -> Result<f64, NegativeGap> {
    let Some(p) = primal else {
        return Ok(1.0);
    };
    match dual {
        Cost::Finite(d) if d <= p => Ok((p - d) as f64 / p.max(1) as f64),
        _ => Err(NegativeGap { primal: p, dual }),
    }
}
