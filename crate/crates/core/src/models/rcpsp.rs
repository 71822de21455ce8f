//! Resource-constrained project scheduling. Tasks are placed one at a time
//! at their earliest feasible start no earlier than the previous placement;
//! the path cost tracks a makespan estimate so that a complete schedule
//! costs exactly its makespan.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{invalid, InstanceError};
use crate::cost::Cost;
use crate::cp::{
    ect_envelope, AdapterError, BuildContext, CpModel, CumulativeTask, DomainStore, EnvelopeTask,
    PropagationAdapter, Propagator, VarId,
};
use crate::model::{DpModel, Successor};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcpspTask {
    pub p: i64,
    /// Usage per resource.
    pub u: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcpspInstance {
    pub tasks: Vec<RcpspTask>,
    pub capacities: Vec<i64>,
    /// `(i, j)`: task `i` must finish before `j` starts.
    pub precedences: Vec<(usize, usize)>,
}

impl RcpspInstance {
    pub fn horizon(&self) -> i64 {
        self.tasks.iter().map(|t| t.p).sum()
    }

    /// Checks ranges and acyclicity; returns a topological order.
    pub fn validate(&self) -> Result<Vec<usize>, InstanceError> {
        let n = self.tasks.len();
        let k = self.capacities.len();
        if self.capacities.iter().any(|&c| c < 1) {
            return invalid("capacities must be positive");
        }
        for (i, t) in self.tasks.iter().enumerate() {
            if t.p < 1 {
                return invalid(format!("task {i} has non-positive duration"));
            }
            if t.u.len() != k || t.u.iter().any(|&u| u < 0) {
                return invalid(format!("task {i} needs {k} non-negative usages"));
            }
        }
        let mut indeg = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for &(i, j) in &self.precedences {
            if i >= n || j >= n || i == j {
                return invalid(format!("bad precedence ({i}, {j})"));
            }
            succ[i].push(j);
            indeg[j] += 1;
        }
        let mut order: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let i = order[head];
            head += 1;
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    order.push(j);
                }
            }
        }
        if order.len() != n {
            return invalid("precedence graph has a cycle");
        }
        Ok(order)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RcpspState {
    pub starts: Vec<Option<i64>>,
    pub time: i64,
}

impl RcpspState {
    pub fn scheduled(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.starts.len());
        for (i, st) in self.starts.iter().enumerate() {
            s.set(i, st.is_some());
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RcpspOptions {
    pub left_shift: bool,
    pub dominance: bool,
}

impl Default for RcpspOptions {
    fn default() -> Self {
        RcpspOptions {
            left_shift: true,
            dominance: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RcpspModel {
    inst: RcpspInstance,
    opts: RcpspOptions,
    preds: Vec<Vec<usize>>,
    topo: Vec<usize>,
    horizon: i64,
}

impl RcpspModel {
    pub fn new(inst: RcpspInstance, opts: RcpspOptions) -> Result<Self, InstanceError> {
        let topo = inst.validate()?;
        let mut preds = vec![Vec::new(); inst.tasks.len()];
        for &(i, j) in &inst.precedences {
            preds[j].push(i);
        }
        Ok(RcpspModel {
            horizon: inst.horizon(),
            inst,
            opts,
            preds,
            topo,
        })
    }

    pub fn instance(&self) -> &RcpspInstance {
        &self.inst
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    fn finish(&self, s: &RcpspState, i: usize) -> Option<i64> {
        s.starts[i].map(|st| st + self.inst.tasks[i].p)
    }

    /// Makespan estimate: scheduled finishes, and unscheduled tasks as if
    /// started now.
    pub fn makespan_estimate(&self, s: &RcpspState) -> i64 {
        self.inst
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| s.starts[i].unwrap_or(s.time) + t.p)
            .max()
            .unwrap_or(0)
    }

    fn fits(&self, s: &RcpspState, task: usize, h: i64) -> bool {
        let p = self.inst.tasks[task].p;
        // load only rises at start times, so checking `h` and every start
        // inside the window covers the whole window
        let mut probes = vec![h];
        probes.extend(s.starts.iter().flatten().copied().filter(|&st| h < st && st < h + p));
        probes.iter().all(|&x| {
            self.inst.capacities.iter().enumerate().all(|(r, &cap)| {
                let load: i64 = s
                    .starts
                    .iter()
                    .enumerate()
                    .filter_map(|(i, st)| st.map(|st| (i, st)))
                    .filter(|&(i, st)| st <= x && x < st + self.inst.tasks[i].p)
                    .map(|(i, _)| self.inst.tasks[i].u[r])
                    .sum();
                load + self.inst.tasks[task].u[r] <= cap
            })
        })
    }

    /// Earliest `h ∈ [t, H]` at which `task` can start: predecessors done and
    /// no resource overloaded while it runs. `None` if there is none or a
    /// predecessor is unscheduled.
    pub fn earliest_time(&self, s: &RcpspState, task: usize) -> Option<i64> {
        let mut lo = s.time;
        for &j in &self.preds[task] {
            lo = lo.max(self.finish(s, j)?);
        }
        let mut candidates: Vec<i64> = s
            .starts
            .iter()
            .enumerate()
            .filter_map(|(i, _)| self.finish(s, i))
            .filter(|&f| f > lo)
            .collect();
        candidates.push(lo);
        candidates.sort_unstable();
        candidates.dedup();
        candidates
            .into_iter()
            .take_while(|&h| h <= self.horizon)
            .find(|&h| self.fits(s, task, h))
    }

    fn place(&self, s: &RcpspState, task: usize, h: i64) -> RcpspState {
        let mut starts = s.starts.clone();
        starts[task] = Some(h);
        RcpspState { starts, time: h }
    }

    /// Topology-aware earliest finish of every unscheduled task from `s`,
    /// ignoring resources.
    fn critical_path(&self, s: &RcpspState) -> i64 {
        let mut finish = vec![0i64; self.inst.tasks.len()];
        let mut best = 0;
        for &i in &self.topo {
            finish[i] = match s.starts[i] {
                Some(st) => st + self.inst.tasks[i].p,
                None => {
                    let head = self.preds[i].iter().map(|&j| finish[j]).fold(s.time, i64::max);
                    let f = head + self.inst.tasks[i].p;
                    best = best.max(f);
                    f
                }
            };
        }
        best
    }

    fn energy_bound(&self, s: &RcpspState) -> i64 {
        let mut best = 0;
        for (r, &cap) in self.inst.capacities.iter().enumerate() {
            let energy: i64 = self
                .inst
                .tasks
                .iter()
                .enumerate()
                .filter(|&(i, _)| s.starts[i].is_none())
                .map(|(_, t)| t.u[r] * t.p)
                .sum();
            if energy > 0 {
                best = best.max(s.time + (energy + cap - 1) / cap);
            }
        }
        best
    }

    /// Critical-path and energy bounds on the final makespan.
    pub fn makespan_bounds(&self, s: &RcpspState) -> (i64, i64) {
        (self.critical_path(s), self.energy_bound(s))
    }

    fn remaining(&self, s: &RcpspState, makespan_bound: i64) -> Cost {
        Cost::from_signed(makespan_bound - self.makespan_estimate(s))
    }
}

impl DpModel for RcpspModel {
    type State = RcpspState;
    type Label = usize;
    type Signature = FixedBitSet;

    fn target(&self) -> RcpspState {
        RcpspState {
            starts: vec![None; self.inst.tasks.len()],
            time: 0,
        }
    }

    fn is_base(&self, s: &RcpspState) -> bool {
        s.starts.iter().all(Option::is_some)
    }

    fn base_cost(&self, _: &RcpspState) -> Cost {
        Cost::ZERO
    }

    fn successors(&self, s: &RcpspState) -> Vec<Successor<RcpspState, usize>> {
        let candidates: Vec<(usize, i64)> = (0..self.inst.tasks.len())
            .filter(|&i| s.starts[i].is_none())
            .filter_map(|i| self.earliest_time(s, i).map(|h| (i, h)))
            .collect();
        let before = self.makespan_estimate(s);
        candidates
            .iter()
            .filter(|&&(j, hj)| {
                !self.opts.left_shift
                    || !candidates
                        .iter()
                        .any(|&(i, hi)| i != j && hi + self.inst.tasks[i].p <= hj)
            })
            .map(|&(i, h)| {
                let state = self.place(s, i, h);
                Successor {
                    weight: Cost::from_signed(self.makespan_estimate(&state) - before),
                    label: i,
                    state,
                }
            })
            .collect()
    }

    /// Same scheduled set, no later current time, and every task still
    /// running at `a`'s current time started no later in `a`.
    fn dominates(&self, a: &RcpspState, b: &RcpspState) -> bool {
        if !self.opts.dominance {
            return a == b;
        }
        a.time <= b.time
            && a.starts.iter().zip(&b.starts).zip(&self.inst.tasks).all(|((sa, sb), t)| match (sa, sb) {
                (Some(x), Some(y)) => (*x).max(*y) + t.p <= a.time || x <= y,
                _ => true,
            })
    }

    fn dual(&self, s: &RcpspState) -> Cost {
        let (cp, energy) = self.makespan_bounds(s);
        self.remaining(s, cp.max(energy))
    }

    fn signature(&self, s: &RcpspState) -> FixedBitSet {
        s.scheduled()
    }

    fn initial_cost(&self) -> Cost {
        Cost::from_signed(self.makespan_estimate(&self.target()))
    }
}

/// Constraint model with start variable `i` per task and the makespan
/// variable last. Propagators are emitted as one cumulative per resource,
/// then every precedence, then `s_i + p_i <= o` per unscheduled task.
pub struct RcpspAdapter<'a> {
    model: &'a RcpspModel,
}

impl<'a> RcpspAdapter<'a> {
    pub fn new(model: &'a RcpspModel) -> Self {
        RcpspAdapter { model }
    }

    fn objective(&self) -> VarId {
        VarId(self.model.inst.tasks.len())
    }

    /// Bounds on the final makespan read from `store` for state `s`:
    /// the energy envelope and the latest earliest finish.
    pub fn makespan_bounds_cp(&self, s: &RcpspState, store: &DomainStore) -> (i64, i64) {
        let tasks = &self.model.inst.tasks;
        let lb = |i: usize| store.lb(VarId(i)).max(s.time);
        let unscheduled: Vec<usize> = (0..tasks.len()).filter(|&i| s.starts[i].is_none()).collect();
        let envelope = self
            .model
            .inst
            .capacities
            .iter()
            .enumerate()
            .map(|(r, &cap)| {
                let env: Vec<EnvelopeTask> = unscheduled
                    .iter()
                    .filter(|&&i| tasks[i].u[r] > 0)
                    .map(|&i| EnvelopeTask {
                        lb_start: lb(i),
                        duration: tasks[i].p,
                        usage: tasks[i].u[r],
                    })
                    .collect();
                ect_envelope(&env, cap)
            })
            .max()
            .unwrap_or(0);
        let finish = unscheduled.iter().map(|&i| lb(i) + tasks[i].p).max().unwrap_or(0);
        (envelope, finish)
    }
}

impl PropagationAdapter<RcpspModel> for RcpspAdapter<'_> {
    fn build(&mut self, s: &RcpspState, ctx: BuildContext) -> Result<CpModel, AdapterError> {
        let inst = &self.model.inst;
        let h = self.model.horizon;
        let mut store = DomainStore::new();
        for (i, t) in inst.tasks.iter().enumerate() {
            match s.starts[i] {
                Some(st) => store.add_interval(st, st),
                None => store.add_interval(s.time, h - t.p),
            };
        }
        let o_ub = match ctx.primal {
            Cost::Finite(p) => h.min(i64::try_from(p).unwrap_or(i64::MAX)),
            Cost::Infinity => h,
        };
        store.add_interval(0, o_ub);
        let o = self.objective();

        let mut props = Vec::new();
        for (r, &cap) in inst.capacities.iter().enumerate() {
            let tasks: Vec<CumulativeTask> = inst
                .tasks
                .iter()
                .enumerate()
                .filter(|&(i, t)| t.u[r] > 0 && s.starts[i].is_none_or(|st| st + t.p > s.time))
                .map(|(i, t)| CumulativeTask {
                    start: VarId(i),
                    duration: t.p,
                    usage: t.u[r],
                })
                .collect();
            props.push(Propagator::Cumulative { tasks, capacity: cap });
        }
        for &(i, j) in &inst.precedences {
            props.push(Propagator::PrecedenceLe {
                before: VarId(i),
                offset: inst.tasks[i].p,
                after: VarId(j),
            });
        }
        for (i, t) in inst.tasks.iter().enumerate() {
            if s.starts[i].is_none() {
                props.push(Propagator::PrecedenceLe {
                    before: VarId(i),
                    offset: t.p,
                    after: o,
                });
            }
        }
        Ok(CpModel { store, propagators: props })
    }

    fn dual_cp(&self, s: &RcpspState, store: &DomainStore) -> Cost {
        let (envelope, finish) = self.makespan_bounds_cp(s, store);
        let bound = envelope.max(finish).max(store.lb(self.objective()));
        self.model.remaining(s, bound)
    }

    fn is_succ_infeasible(&self, _: &RcpspState, succ: &Successor<RcpspState, usize>, store: &DomainStore) -> bool {
        let h = succ.state.starts[succ.label].expect("successor schedules its label");
        !store.contains(VarId(succ.label), h)
    }
}

/// Minimum makespan over every precedence-feasible task order, each order
/// scheduled greedily with [`RcpspModel::earliest_time`]. `None` if no
/// order can be completed.
pub fn ordering_oracle(model: &RcpspModel) -> Option<i64> {
    fn go(m: &RcpspModel, s: &RcpspState, best: &mut Option<i64>) {
        if m.is_base(s) {
            let ms = m.makespan_estimate(s);
            *best = Some(best.map_or(ms, |b| b.min(ms)));
            return;
        }
        for i in 0..s.starts.len() {
            if s.starts[i].is_none() {
                if let Some(h) = m.earliest_time(s, i) {
                    go(m, &m.place(s, i, h), best);
                }
            }
        }
    }
    let mut best = None;
    go(model, &model.target(), &mut best);
    best
}
