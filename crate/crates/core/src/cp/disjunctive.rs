//! Edge-finding for the disjunctive (unary resource) constraint.
//!
//! Quadratic formulation: tasks are scanned in order of latest completion
//! time; for every prefix Ω the earliest completion time of Ω and of
//! Ω ∪ {i} is read from per-threshold energy sums, so each (Ω, i) test is
//! O(1) after an O(n) refresh per prefix.

use super::domain::{DomainStore, VarId};

/// Duration of a disjunctive item: a constant or the lower bound of a
/// variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DurationSpec {
    Fixed(i64),
    Var(VarId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisjunctiveItem {
    pub start: VarId,
    pub duration: DurationSpec,
}

impl DisjunctiveItem {
    pub fn fixed(start: VarId, duration: i64) -> Self {
        DisjunctiveItem {
            start,
            duration: DurationSpec::Fixed(duration),
        }
    }

    pub fn variable(start: VarId, duration: VarId) -> Self {
        DisjunctiveItem {
            start,
            duration: DurationSpec::Var(duration),
        }
    }
}

const NONE: i64 = i64::MIN / 4;

/// Lifts earliest start times. Returns `None` on overload.
///
/// `est[i] + p[i] <= lct[i]` is not assumed; an empty window surfaces as an
/// overload of the singleton set.
pub(crate) fn edge_find_lower(est: &[i64], lct: &[i64], p: &[i64]) -> Option<Vec<i64>> {
    let n = est.len();
    let mut new_est = est.to_vec();
    if n == 0 {
        return Some(new_est);
    }
    let mut by_lct: Vec<usize> = (0..n).collect();
    by_lct.sort_by_key(|&i| (lct[i], i));

    let mut thetas: Vec<i64> = est.to_vec();
    thetas.sort_unstable();
    thetas.dedup();
    let m = thetas.len();
    let pos: Vec<usize> = est
        .iter()
        .map(|e| thetas.binary_search(e).expect("every est is a threshold"))
        .collect();

    // energy[θ] = Σ p over Ω with est >= thetas[θ]; count tracks non-emptiness
    let mut energy = vec![0i64; m];
    let mut count = vec![0usize; m];
    let mut prefix_max = vec![NONE; m];
    let mut suffix_max = vec![NONE; m + 1];

    for k in 0..n {
        let t = by_lct[k];
        for q in 0..=pos[t] {
            energy[q] += p[t];
            count[q] += 1;
        }
        let lct_omega = lct[t];

        let mut best = NONE;
        for q in 0..m {
            best = best.max(thetas[q] + energy[q]);
            prefix_max[q] = best;
        }
        suffix_max[m] = NONE;
        for q in (0..m).rev() {
            let own = if count[q] > 0 { thetas[q] + energy[q] } else { NONE };
            suffix_max[q] = suffix_max[q + 1].max(own);
        }
        let ect_omega = suffix_max[0];
        if ect_omega > lct_omega {
            return None;
        }

        for &i in &by_lct[k + 1..] {
            let with_i = (prefix_max[pos[i]] + p[i]).max(suffix_max[pos[i] + 1]);
            if with_i > lct_omega && ect_omega > new_est[i] {
                new_est[i] = ect_omega;
            }
        }
    }
    Some(new_est)
}

/// Edge-finding over `items`: lifts start lower bounds (job after Ω) and
/// lowers start upper bounds (job before Ω). Items whose duration lower bound
/// is not positive are ignored. Returns whether any domain changed.
pub fn edge_finding_disjunctive(store: &mut DomainStore, items: &[DisjunctiveItem]) -> bool {
    if store.is_infeasible() {
        return false;
    }
    let active: Vec<(VarId, i64)> = items
        .iter()
        .map(|it| {
            let p = match it.duration {
                DurationSpec::Fixed(p) => p,
                DurationSpec::Var(v) => store.lb(v),
            };
            (it.start, p)
        })
        .filter(|&(_, p)| p > 0)
        .collect();
    if active.len() < 2 {
        return false;
    }
    let p: Vec<i64> = active.iter().map(|a| a.1).collect();
    let mut changed = false;

    let est: Vec<i64> = active.iter().map(|&(s, _)| store.lb(s)).collect();
    let lct: Vec<i64> = active.iter().map(|&(s, d)| store.ub(s) + d).collect();
    let Some(lifted) = edge_find_lower(&est, &lct, &p) else {
        store.mark_infeasible();
        return false;
    };
    for (&(s, _), &lb) in active.iter().zip(&lifted) {
        changed |= store.set_lb(s, lb);
        if store.is_infeasible() {
            return changed;
        }
    }

    // mirror image: negate time so "before Ω" becomes "after Ω"
    let est: Vec<i64> = active.iter().map(|&(s, d)| -(store.ub(s) + d)).collect();
    let lct: Vec<i64> = active.iter().map(|&(s, _)| -store.lb(s)).collect();
    let Some(lifted) = edge_find_lower(&est, &lct, &p) else {
        store.mark_infeasible();
        return changed;
    };
    for (&(s, d), &mirrored) in active.iter().zip(&lifted) {
        changed |= store.set_ub(s, -mirrored - d);
        if store.is_infeasible() {
            return changed;
        }
    }
    changed
}
