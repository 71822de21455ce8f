//! Exhaustive Bellman recursion used as ground truth on small instances.

use std::collections::HashMap;

use thiserror::Error;

use crate::cost::{Cost, CostOverflow};
use crate::model::DpModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("state space deeper than {0} transitions")]
    DepthExceeded(usize),
    #[error(transparent)]
    Overflow(#[from] CostOverflow),
}

/// Memoized exact value computation keyed on exact state equality.
///
/// The memo table survives between calls, so after evaluating the target it
/// holds the value of every state reachable from it.
pub struct Oracle<'a, M: DpModel> {
    model: &'a M,
    depth_cap: usize,
    memo: HashMap<M::State, Cost>,
}

impl<'a, M: DpModel> Oracle<'a, M> {
    pub fn new(model: &'a M, depth_cap: usize) -> Self {
        Oracle {
            model,
            depth_cap,
            memo: HashMap::new(),
        }
    }

    pub fn value(&mut self, state: &M::State) -> Result<Cost, OracleError> {
        self.value_at(state, 0)
    }

    fn value_at(&mut self, state: &M::State, depth: usize) -> Result<Cost, OracleError> {
        if let Some(&v) = self.memo.get(state) {
            return Ok(v);
        }
        let value = if self.model.is_base(state) {
            self.model.base_cost(state)
        } else {
            if depth >= self.depth_cap {
                return Err(OracleError::DepthExceeded(self.depth_cap));
            }
            let mut best = Cost::Infinity;
            for succ in self.model.successors(state) {
                let v = self.value_at(&succ.state, depth + 1)?;
                best = best.min(succ.weight.checked_add(v)?);
            }
            best
        };
        self.memo.insert(state.clone(), value);
        Ok(value)
    }

    /// Every state evaluated so far with its exact value.
    pub fn table(&self) -> &HashMap<M::State, Cost> {
        &self.memo
    }

    pub fn into_table(self) -> HashMap<M::State, Cost> {
        self.memo
    }
}

/// Exact value of `state`, or `DepthExceeded` if some path from it needs more
/// than `depth_cap` transitions to reach a base state.
pub fn brute_force_value<M: DpModel>(
    model: &M,
    state: &M::State,
    depth_cap: usize,
) -> Result<Cost, OracleError> {
    Oracle::new(model, depth_cap).value(state)
}

/// Optimal cost of the whole model: initial cost plus the target's value.
pub fn optimal_cost<M: DpModel>(model: &M, depth_cap: usize) -> Result<Cost, OracleError> {
    let v = brute_force_value(model, &model.target(), depth_cap)?;
    Ok(model.initial_cost().checked_add(v)?)
}
