//! Integer domain store, propagators and propagation drivers.

mod adapter;
mod cumulative;
mod disjunctive;
mod domain;
mod envelope;
mod linear;

pub use adapter::{AdapterError, BuildContext, CpModel, PropagationAdapter};
pub use cumulative::{time_table_cumulative, CumulativeTask};
pub use disjunctive::{edge_finding_disjunctive, DisjunctiveItem, DurationSpec};
pub use domain::{Domain, DomainStore, VarId};
pub use envelope::{ect_envelope, EnvelopeTask};
pub use linear::{precedence_le, sum_le};

/// A stateless constraint descriptor over the variables of one store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Propagator {
    Disjunctive(Vec<DisjunctiveItem>),
    Cumulative { tasks: Vec<CumulativeTask>, capacity: i64 },
    /// `before + offset <= after`
    PrecedenceLe { before: VarId, offset: i64, after: VarId },
    /// `Σ terms <= cap`; `None` means no cap yet.
    SumLe { terms: Vec<VarId>, cap: Option<i64> },
}

impl Propagator {
    /// Applies the propagator once. Returns whether any domain changed.
    pub fn propagate(&self, store: &mut DomainStore) -> bool {
        match self {
            Propagator::Disjunctive(items) => edge_finding_disjunctive(store, items),
            Propagator::Cumulative { tasks, capacity } => time_table_cumulative(store, tasks, *capacity),
            Propagator::PrecedenceLe { before, offset, after } => precedence_le(store, *before, *offset, *after),
            Propagator::SumLe { terms, cap } => sum_le(store, terms, *cap),
        }
    }

    pub fn vars(&self) -> Vec<VarId> {
        match self {
            Propagator::Disjunctive(items) => items
                .iter()
                .flat_map(|it| match it.duration {
                    DurationSpec::Fixed(_) => vec![it.start],
                    DurationSpec::Var(d) => vec![it.start, d],
                })
                .collect(),
            Propagator::Cumulative { tasks, .. } => tasks.iter().map(|t| t.start).collect(),
            Propagator::PrecedenceLe { before, after, .. } => vec![*before, *after],
            Propagator::SumLe { terms, .. } => terms.clone(),
        }
    }

    /// Checks variable ranges and sign requirements on constants.
    pub fn validate(&self, n_vars: usize) -> Result<(), String> {
        if let Some(v) = self.vars().into_iter().find(|v| v.index() >= n_vars) {
            return Err(format!("variable {} out of range ({n_vars} variables)", v.index()));
        }
        match self {
            Propagator::Disjunctive(items) => {
                if items.iter().any(|it| matches!(it.duration, DurationSpec::Fixed(p) if p < 0)) {
                    return Err("negative disjunctive duration".into());
                }
            }
            Propagator::Cumulative { tasks, capacity }
                if *capacity < 0 || tasks.iter().any(|t| t.duration < 0 || t.usage < 0) =>
            {
                return Err("negative cumulative constant".into());
            }
            _ => {}
        }
        Ok(())
    }
}

/// Runs every propagator exactly once, in order. Returns whether anything
/// changed.
pub fn propagate_once(store: &mut DomainStore, props: &[Propagator]) -> bool {
    let mut changed = false;
    for p in props {
        if store.is_infeasible() {
            break;
        }
        changed |= p.propagate(store);
    }
    changed
}

/// Repeats full passes until one changes nothing or the store is infeasible.
/// Returns the number of passes run.
pub fn propagate_fixpoint(store: &mut DomainStore, props: &[Propagator]) -> usize {
    let mut passes = 0;
    loop {
        passes += 1;
        if !propagate_once(store, props) || store.is_infeasible() {
            return passes;
        }
    }
}
