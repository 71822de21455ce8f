//! The contract between a DP model and its constraint model.

use thiserror::Error;

use super::domain::DomainStore;
use super::Propagator;
use crate::cost::Cost;
use crate::model::{DpModel, Successor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inconsistent constraint model: {0}")]
pub struct AdapterError(pub String);

/// Search-side quantities a model build may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildContext {
    /// Path cost of the state being expanded.
    pub g: Cost,
    /// Best incumbent cost, `Infinity` before the first solution.
    pub primal: Cost,
}

#[derive(Debug, Clone)]
pub struct CpModel {
    pub store: DomainStore,
    pub propagators: Vec<Propagator>,
}

/// Builds and interprets the constraint model of a DP state.
///
/// The variable layout must be identical for every state of one instance;
/// `build` only re-bounds it. Equal states must yield equal models.
pub trait PropagationAdapter<M: DpModel> {
    fn build(&mut self, state: &M::State, ctx: BuildContext) -> Result<CpModel, AdapterError>;

    fn is_infeasible(&self, _state: &M::State, store: &DomainStore) -> bool {
        store.is_infeasible()
    }

    /// Lower bound on the remaining cost of `state`, read off `store`. Also
    /// called with a successor of the state `store` was built for.
    fn dual_cp(&self, state: &M::State, store: &DomainStore) -> Cost;

    fn is_succ_infeasible(
        &self,
        state: &M::State,
        succ: &Successor<M::State, M::Label>,
        store: &DomainStore,
    ) -> bool;
}
