//! Time-table filtering for the cumulative constraint.

use super::domain::{DomainStore, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CumulativeTask {
    pub start: VarId,
    pub duration: i64,
    pub usage: i64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    start: i64,
    end: i64,
    height: i64,
}

/// Builds the compulsory-part profile and pushes start bounds past every
/// segment that cannot accommodate the task. Returns whether any domain
/// changed.
pub fn time_table_cumulative(store: &mut DomainStore, tasks: &[CumulativeTask], capacity: i64) -> bool {
    if store.is_infeasible() {
        return false;
    }
    let tasks: Vec<CumulativeTask> = tasks
        .iter()
        .copied()
        .filter(|t| t.usage > 0 && t.duration > 0)
        .collect();
    if tasks.iter().any(|t| t.usage > capacity) {
        store.mark_infeasible();
        return false;
    }

    // compulsory part [ub(s), lb(s) + p)
    let parts: Vec<Option<(i64, i64)>> = tasks
        .iter()
        .map(|t| {
            let (a, b) = (store.ub(t.start), store.lb(t.start) + t.duration);
            (a < b).then_some((a, b))
        })
        .collect();

    let mut events: Vec<(i64, i64)> = Vec::new();
    for (t, part) in tasks.iter().zip(&parts) {
        if let Some((a, b)) = *part {
            events.push((a, t.usage));
            events.push((b, -t.usage));
        }
    }
    if events.is_empty() {
        return false;
    }
    events.sort_unstable();
    let mut profile: Vec<Segment> = Vec::new();
    let mut height = 0;
    let mut idx = 0;
    while idx < events.len() {
        let at = events[idx].0;
        while idx < events.len() && events[idx].0 == at {
            height += events[idx].1;
            idx += 1;
        }
        if height > 0 && idx < events.len() {
            profile.push(Segment {
                start: at,
                end: events[idx].0,
                height,
            });
        }
    }
    if profile.iter().any(|s| s.height > capacity) {
        store.mark_infeasible();
        return false;
    }

    let mut changed = false;
    for (t, part) in tasks.iter().zip(&parts) {
        let conflicts = |seg: &Segment| {
            let own = match part {
                Some((a, b)) if *a <= seg.start && seg.end <= *b => t.usage,
                _ => 0,
            };
            seg.height - own + t.usage > capacity
        };

        let mut lb = store.lb(t.start);
        for seg in &profile {
            if seg.start >= lb + t.duration {
                break;
            }
            if seg.end > lb && conflicts(seg) {
                lb = seg.end;
            }
        }
        changed |= store.set_lb(t.start, lb);
        if store.is_infeasible() {
            return changed;
        }

        let mut ub = store.ub(t.start);
        for seg in profile.iter().rev() {
            if seg.end <= ub {
                break;
            }
            if seg.start < ub + t.duration && conflicts(seg) {
                ub = seg.start - t.duration;
            }
        }
        changed |= store.set_ub(t.start, ub);
        if store.is_infeasible() {
            return changed;
        }
    }
    changed
}
