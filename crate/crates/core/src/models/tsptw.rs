//! Traveling salesperson with time windows. The tour starts at the depot
//! (location 0) at time 0, visits every other location once, waits for
//! window openings without charge, and returns to the depot. The objective
//! is total travel time.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{invalid, InstanceError};
use crate::cost::Cost;
use crate::cp::{AdapterError, BuildContext, CpModel, DisjunctiveItem, DomainStore, PropagationAdapter, Propagator, VarId};
use crate::model::{DpModel, Successor};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsptwInstance {
    pub n: usize,
    /// Travel times; `None` marks a missing arc.
    pub c: Vec<Vec<Option<i64>>>,
    /// `(release, deadline)` per location.
    pub windows: Vec<(i64, i64)>,
}

impl TsptwInstance {
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.n;
        if n == 0 {
            return invalid("need at least the depot");
        }
        if self.c.len() != n || self.c.iter().any(|row| row.len() != n) {
            return invalid(format!("travel matrix must be {n} x {n}"));
        }
        if self.c.iter().flatten().flatten().any(|&x| x < 0) {
            return invalid("negative travel time");
        }
        if self.windows.len() != n {
            return invalid(format!("expected {n} time windows"));
        }
        if let Some(i) = self.windows.iter().position(|&(r, d)| r > d || r < 0) {
            return invalid(format!("window of location {i} is empty or negative"));
        }
        Ok(())
    }

    /// Arc `i -> j`; self-loops count as missing.
    pub fn arc(&self, i: usize, j: usize) -> Option<i64> {
        if i == j {
            None
        } else {
            self.c[i][j]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TsptwState {
    pub unvisited: FixedBitSet,
    pub location: usize,
    pub time: i64,
}

#[derive(Debug, Clone)]
pub struct TsptwModel {
    inst: TsptwInstance,
    /// All-pairs shortest travel times over existing arcs.
    shortest: Vec<Vec<Option<i64>>>,
    min_to: Vec<Option<i64>>,
    min_from: Vec<Option<i64>>,
}

fn add(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

impl TsptwModel {
    pub fn new(inst: TsptwInstance) -> Result<Self, InstanceError> {
        inst.validate()?;
        let n = inst.n;
        let mut sp: Vec<Vec<Option<i64>>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Some(0) } else { inst.c[i][j] }).collect())
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let Some(via) = add(sp[i][k], sp[k][j]) {
                        if sp[i][j].is_none_or(|d| via < d) {
                            sp[i][j] = Some(via);
                        }
                    }
                }
            }
        }
        let min_to = (0..n).map(|l| (0..n).filter_map(|i| inst.arc(i, l)).min()).collect();
        let min_from = (0..n).map(|l| (0..n).filter_map(|i| inst.arc(l, i)).min()).collect();
        Ok(TsptwModel {
            inst,
            shortest: sp,
            min_to,
            min_from,
        })
    }

    pub fn instance(&self) -> &TsptwInstance {
        &self.inst
    }

    pub fn shortest(&self, i: usize, j: usize) -> Option<i64> {
        self.shortest[i][j]
    }

    /// The two travel sums of the DP bound: arrivals (depot plus every
    /// unvisited location) and departures (current plus every unvisited).
    pub fn bound_terms(&self, s: &TsptwState) -> (Cost, Cost) {
        let to = s
            .unvisited
            .ones()
            .try_fold(self.min_to[0].unwrap_or(-1), |acc, i| self.min_to[i].map(|v| acc + v));
        let from = s
            .unvisited
            .ones()
            .try_fold(self.min_from[s.location].unwrap_or(-1), |acc, i| {
                self.min_from[i].map(|v| acc + v)
            });
        let as_cost = |v: Option<i64>, first: Option<i64>| match (v, first) {
            (Some(v), Some(_)) => Cost::from_signed(v),
            _ => Cost::Infinity,
        };
        (as_cost(to, self.min_to[0]), as_cost(from, self.min_from[s.location]))
    }
}

impl DpModel for TsptwModel {
    type State = TsptwState;
    type Label = usize;
    type Signature = (FixedBitSet, usize);

    fn target(&self) -> TsptwState {
        let mut unvisited = FixedBitSet::with_capacity(self.inst.n);
        unvisited.insert_range(1..);
        TsptwState {
            unvisited,
            location: 0,
            time: 0,
        }
    }

    fn is_base(&self, s: &TsptwState) -> bool {
        s.unvisited.is_clear()
    }

    fn base_cost(&self, s: &TsptwState) -> Cost {
        if s.location == 0 {
            return Cost::ZERO;
        }
        self.inst.arc(s.location, 0).map_or(Cost::Infinity, Cost::from_signed)
    }

    fn successors(&self, s: &TsptwState) -> Vec<Successor<TsptwState, usize>> {
        let l = s.location;
        let late = |j: usize| self.shortest[l][j].is_none_or(|d| s.time + d > self.inst.windows[j].1);
        if s.unvisited.ones().any(late) {
            return Vec::new();
        }
        s.unvisited
            .ones()
            .filter_map(|j| {
                let c = self.inst.arc(l, j)?;
                let (r, d) = self.inst.windows[j];
                if s.time + c > d {
                    return None;
                }
                let mut unvisited = s.unvisited.clone();
                unvisited.set(j, false);
                Some(Successor {
                    weight: Cost::from_signed(c),
                    label: j,
                    state: TsptwState {
                        unvisited,
                        location: j,
                        time: (s.time + c).max(r),
                    },
                })
            })
            .collect()
    }

    fn dominates(&self, a: &TsptwState, b: &TsptwState) -> bool {
        a.time <= b.time
    }

    fn dual(&self, s: &TsptwState) -> Cost {
        let (to, from) = self.bound_terms(s);
        to.max(from)
    }

    fn signature(&self, s: &TsptwState) -> (FixedBitSet, usize) {
        (s.unvisited.clone(), s.location)
    }
}

/// Constraint model with arrival variable `i`, outgoing-travel variable
/// `n + i` and the objective variable `2n`. Locations outside `U ∪ {l}`
/// keep placeholders. Propagators: one disjunctive over `U ∪ {l}`, then the
/// travel sum capped by the remaining budget.
pub struct TsptwAdapter<'a> {
    model: &'a TsptwModel,
}

impl<'a> TsptwAdapter<'a> {
    pub fn new(model: &'a TsptwModel) -> Self {
        TsptwAdapter { model }
    }

    fn n(&self) -> usize {
        self.model.inst.n
    }

    fn arrival(&self, i: usize) -> VarId {
        VarId(i)
    }

    fn travel(&self, i: usize) -> VarId {
        VarId(self.n() + i)
    }

    fn active(s: &TsptwState) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(s.location).chain(s.unvisited.ones())
    }
}

impl PropagationAdapter<TsptwModel> for TsptwAdapter<'_> {
    fn build(&mut self, s: &TsptwState, ctx: BuildContext) -> Result<CpModel, AdapterError> {
        let inst = &self.model.inst;
        let n = inst.n;
        let l = s.location;
        let mut active = FixedBitSet::with_capacity(n);
        for i in Self::active(s) {
            active.insert(i);
        }

        let window: Vec<(i64, i64)> = (0..n)
            .map(|i| {
                if i == l {
                    (s.time, inst.windows[i].1.max(s.time))
                } else if active.contains(i) {
                    (s.time.max(inst.windows[i].0), inst.windows[i].1)
                } else {
                    (0, 0)
                }
            })
            .collect();
        let mut store = DomainStore::new();
        for &(lo, hi) in &window {
            store.add_interval(lo, hi);
        }
        for i in 0..n {
            if !active.contains(i) {
                store.add_set([0]);
                continue;
            }
            // the tour cannot end at i if some j must come strictly later
            let not_last = s.unvisited.ones().filter(|&j| j != i).any(|j| {
                window[j].0 > window[i].1
                    || (window[j].0 == window[i].1 && self.model.shortest(j, i) != Some(0))
            });
            let next = s.unvisited.ones().chain((!not_last && i != 0).then_some(0));
            store.add_set(next.filter(|&j| j != i).filter_map(|j| inst.arc(i, j)));
        }
        let o_ub = s
            .unvisited
            .ones()
            .filter_map(|i| inst.arc(i, 0).map(|c| inst.windows[i].1 + c))
            .max()
            .unwrap_or(0);
        store.add_interval(0, o_ub.max(0));

        let items = Self::active(s)
            .map(|i| DisjunctiveItem::variable(self.arrival(i), self.travel(i)))
            .collect();
        let cap = match (ctx.primal, ctx.g) {
            (Cost::Finite(p), Cost::Finite(g)) => Some(p as i64 - g as i64),
            _ => None,
        };
        let terms = Self::active(s).map(|i| self.travel(i)).collect();
        Ok(CpModel {
            store,
            propagators: vec![Propagator::Disjunctive(items), Propagator::SumLe { terms, cap }],
        })
    }

    fn dual_cp(&self, s: &TsptwState, store: &DomainStore) -> Cost {
        Cost::from_signed(Self::active(s).map(|i| store.lb(self.travel(i))).sum())
    }

    /// Arrival at the next location and the travel time out of the current
    /// one must both survive propagation.
    fn is_succ_infeasible(&self, s: &TsptwState, succ: &Successor<TsptwState, usize>, store: &DomainStore) -> bool {
        let j = succ.label;
        let Some(c) = self.model.inst.arc(s.location, j) else {
            return true;
        };
        let arrival = (s.time + c).max(self.model.inst.windows[j].0);
        !store.contains(self.arrival(j), arrival) || !store.contains(self.travel(s.location), c)
    }
}

/// Minimum tour cost over all visit orders, or `None` if no order respects
/// the windows.
pub fn permutation_oracle(inst: &TsptwInstance) -> Option<u64> {
    fn go(inst: &TsptwInstance, left: &mut Vec<usize>, at: usize, t: i64, cost: i64, best: &mut Option<i64>) {
        if left.is_empty() {
            let back = if at == 0 { Some(0) } else { inst.arc(at, 0) };
            if let Some(b) = back {
                *best = Some(best.map_or(cost + b, |x| x.min(cost + b)));
            }
            return;
        }
        for k in 0..left.len() {
            let j = left[k];
            let Some(c) = inst.arc(at, j) else { continue };
            let (r, d) = inst.windows[j];
            let arrive = (t + c).max(r);
            if arrive > d {
                continue;
            }
            left.swap_remove(k);
            go(inst, left, j, arrive, cost + c, best);
            left.push(j);
            let last = left.len() - 1;
            left.swap(k, last);
        }
    }
    let mut left: Vec<usize> = (1..inst.n).collect();
    let mut best = None;
    go(inst, &mut left, 0, 0, 0, &mut best);
    best.map(|b| b as u64)
}
