use std::time::Instant;

use super::{PropagationMode, SearchError};
use crate::cost::Cost;
use crate::cp::{propagate_fixpoint, propagate_once, AdapterError, BuildContext, DomainStore, PropagationAdapter};
use crate::model::{DpModel, Successor};

/// Result of successor generation under propagation.
#[derive(Debug, Clone)]
pub struct PropagatedSuccessors<S, L> {
    /// Surviving successors, each with its bound read off the parent's
    /// propagated domains.
    pub successors: Vec<(Successor<S, L>, Cost)>,
    /// Bound of the expanded state itself; `Infinity` when propagation
    /// proved it infeasible.
    pub cp_dual: Cost,
    /// `true` when the state was discarded as a whole.
    pub pruned: bool,
    pub elapsed: f64,
}

/// Builds the state's constraint model, propagates it, and either discards
/// the state or filters its successors against the propagated domains.
pub fn gen_succ_propagation<M, A>(
    model: &M,
    adapter: &mut A,
    state: &M::State,
    g: Cost,
    primal: Cost,
    mode: PropagationMode,
) -> Result<PropagatedSuccessors<M::State, M::Label>, SearchError>
where
    M: DpModel,
    A: PropagationAdapter<M>,
{
    let started = Instant::now();
    let cp = adapter.build(state, BuildContext { g, primal })?;
    for p in &cp.propagators {
        p.validate(cp.store.len()).map_err(AdapterError)?;
    }
    let mut store: DomainStore = cp.store;
    match mode {
        PropagationMode::Off => {}
        PropagationMode::Once => {
            propagate_once(&mut store, &cp.propagators);
        }
        PropagationMode::FixPoint => {
            propagate_fixpoint(&mut store, &cp.propagators);
        }
    }
    let finish = |successors, cp_dual, pruned| PropagatedSuccessors {
        successors,
        cp_dual,
        pruned,
        elapsed: started.elapsed().as_secs_f64(),
    };

    if adapter.is_infeasible(state, &store) {
        return Ok(finish(Vec::new(), Cost::Infinity, true));
    }
    let cp_dual = adapter.dual_cp(state, &store);
    if g.checked_add(cp_dual)? >= primal {
        return Ok(finish(Vec::new(), cp_dual, true));
    }
    let successors = model
        .successors(state)
        .into_iter()
        .filter(|s| !adapter.is_succ_infeasible(state, s, &store))
        .map(|s| {
            let h = adapter.dual_cp(&s.state, &store);
            (s, h)
        })
        .collect();
    Ok(finish(successors, cp_dual, false))
}
