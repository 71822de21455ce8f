//! The dynamic-programming model contract.
//!
//! A model describes a state-transition system: solutions are label sequences
//! that lead from the target state to a base state, and their cost is the sum
//! of the transition weights plus the base cost of the final state. Models
//! also supply a dominance relation (restricted to states with equal
//! signature) and an admissible dual bound. All transition weights are
//! non-negative.

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::cost::{Cost, CostOverflow};

/// One outgoing transition of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Successor<S, L> {
    pub weight: Cost,
    pub label: L,
    pub state: S,
}

pub trait DpModel {
    type State: Clone + Eq + Hash + Debug;
    /// Identifies a transition: a job, task, or location index.
    type Label: Copy + Eq + Hash + Debug;
    /// Key of the dominance bucket a state belongs to.
    type Signature: Clone + Eq + Hash + Debug;

    fn target(&self) -> Self::State;

    fn is_base(&self, state: &Self::State) -> bool;

    fn base_cost(&self, state: &Self::State) -> Cost;

    /// Transitions out of a non-base state, in a fixed order. An empty list
    /// means the state has value infinity.
    fn successors(&self, state: &Self::State) -> Vec<Successor<Self::State, Self::Label>>;

    /// `true` if `a` is guaranteed to be no worse than `b`. Only called on
    /// states with equal signature.
    fn dominates(&self, a: &Self::State, b: &Self::State) -> bool;

    /// Lower bound on the optimal remaining cost of `state`.
    fn dual(&self, state: &Self::State) -> Cost;

    fn signature(&self, state: &Self::State) -> Self::Signature;

    /// Cost charged before the first transition. Zero unless the model uses
    /// an incremental objective that starts from a non-zero estimate.
    fn initial_cost(&self) -> Cost {
        Cost::ZERO
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("transition {0} is not applicable")]
    InvalidTransition(usize),
    #[error("replay ended in a non-base state")]
    NotBase,
    #[error(transparent)]
    Overflow(#[from] CostOverflow),
}

/// Replays `labels` from the target state and returns the solution cost
/// (initial cost, plus transition weights, plus the final base cost).
pub fn evaluate_solution<M: DpModel>(model: &M, labels: &[M::Label]) -> Result<Cost, ReplayError> {
    let mut state = model.target();
    let mut total = model.initial_cost();
    for (step, label) in labels.iter().enumerate() {
        if model.is_base(&state) {
            return Err(ReplayError::InvalidTransition(step));
        }
        let next = model
            .successors(&state)
            .into_iter()
            .find(|s| s.label == *label)
            .ok_or(ReplayError::InvalidTransition(step))?;
        total = total.checked_add(next.weight)?;
        state = next.state;
    }
    if !model.is_base(&state) {
        return Err(ReplayError::NotBase);
    }
    Ok(total.checked_add(model.base_cost(&state))?)
}
