//! Binary precedences and capped sums.

use super::domain::{DomainStore, VarId};

/// Bounds reasoning for `before + offset <= after`.
pub fn precedence_le(store: &mut DomainStore, before: VarId, offset: i64, after: VarId) -> bool {
    if store.is_infeasible() {
        return false;
    }
    let mut changed = store.set_lb(after, store.lb(before) + offset);
    if store.is_infeasible() {
        return changed;
    }
    changed |= store.set_ub(before, store.ub(after) - offset);
    changed
}

/// Removes every value `v` of a term with `v + Σ lb(other terms) > cap`.
/// A missing cap is vacuous.
pub fn sum_le(store: &mut DomainStore, terms: &[VarId], cap: Option<i64>) -> bool {
    let Some(cap) = cap else {
        return false;
    };
    if store.is_infeasible() {
        return false;
    }
    let total: i64 = terms.iter().map(|&x| store.lb(x)).sum();
    if total > cap {
        store.mark_infeasible();
        return false;
    }
    let mut changed = false;
    for &x in terms {
        changed |= store.set_ub(x, cap - (total - store.lb(x)));
    }
    changed
}
