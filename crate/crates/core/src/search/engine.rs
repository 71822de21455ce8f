//! Bookkeeping shared by both search drivers.

use std::mem::size_of;
use std::time::Instant;

use super::{gen_succ_propagation, Incumbent, PropagationMode, SearchError, SolveLimits, SolveResult, Status};
use crate::cost::Cost;
use crate::cp::PropagationAdapter;
use crate::metrics::{optimality_gap, RunMetrics};
use crate::model::{DpModel, Successor};

/// Rough heap payload per stored node on top of its inline size.
const NODE_OVERHEAD: usize = 96;

pub(crate) struct Node<M: DpModel> {
    pub state: M::State,
    pub g: Cost,
    pub f: Cost,
    pub parent: Option<usize>,
    pub label: Option<M::Label>,
    pub alive: bool,
}

pub(crate) enum Expanded<S, L> {
    /// Propagation discarded the state before expansion.
    Pruned,
    Successors(Vec<(Successor<S, L>, Cost)>),
}

pub(crate) struct Engine<'a, M: DpModel, A> {
    pub model: &'a M,
    adapter: Option<&'a mut A>,
    mode: PropagationMode,
    limits: SolveLimits,
    started: Instant,
    pub nodes: Vec<Node<M>>,
    pub metrics: RunMetrics,
    pub primal: Cost,
    pub incumbent: Option<Incumbent<M::Label>>,
    pub root_dual: Cost,
    pub best_dual: Cost,
}

impl<'a, M: DpModel, A: PropagationAdapter<M>> Engine<'a, M, A> {
    pub fn new(
        model: &'a M,
        adapter: Option<&'a mut A>,
        limits: &SolveLimits,
        mode: PropagationMode,
    ) -> Result<Self, SearchError> {
        if mode != PropagationMode::Off && adapter.is_none() {
            return Err(SearchError::MissingAdapter(mode));
        }
        Ok(Engine {
            model,
            adapter,
            mode,
            limits: *limits,
            started: Instant::now(),
            nodes: Vec::new(),
            metrics: RunMetrics::default(),
            primal: Cost::Infinity,
            incumbent: None,
            root_dual: Cost::ZERO,
            best_dual: Cost::ZERO,
        })
    }

    pub fn elapsed(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    /// Heuristic value of a freshly generated state.
    pub fn heuristic(&self, state: &M::State, cp_dual: Cost) -> Cost {
        if self.model.is_base(state) {
            self.model.base_cost(state)
        } else {
            self.model.dual(state).max(cp_dual)
        }
    }

    pub fn root(&mut self) -> Result<usize, SearchError> {
        let state = self.model.target();
        let g = self.model.initial_cost();
        let f = g.checked_add(self.heuristic(&state, Cost::ZERO))?;
        self.root_dual = f;
        self.raise_dual(f);
        Ok(self.push_node(state, g, f, None, None))
    }

    pub fn push_node(
        &mut self,
        state: M::State,
        g: Cost,
        f: Cost,
        parent: Option<usize>,
        label: Option<M::Label>,
    ) -> usize {
        self.nodes.push(Node {
            state,
            g,
            f,
            parent,
            label,
            alive: true,
        });
        self.nodes.len() - 1
    }

    pub fn raise_dual(&mut self, bound: Cost) {
        if bound > self.best_dual {
            self.best_dual = bound;
            let at = self.elapsed();
            self.metrics.push_dual(at, bound);
        }
    }

    pub fn path(&self, mut id: usize) -> Vec<M::Label> {
        let mut labels = Vec::new();
        while let Some(label) = self.nodes[id].label {
            labels.push(label);
            id = self.nodes[id].parent.expect("labelled nodes have parents");
        }
        labels.reverse();
        labels
    }

    /// Records a solution reaching a base state through `parent` (or the
    /// node itself when `label` is `None`). Returns whether it improved.
    pub fn offer_solution(&mut self, cost: Cost, parent: usize, label: Option<M::Label>) -> bool {
        let Cost::Finite(c) = cost else {
            return false;
        };
        if cost >= self.primal {
            return false;
        }
        let mut labels = self.path(parent);
        labels.extend(label);
        self.primal = cost;
        self.incumbent = Some(Incumbent { cost: c, labels });
        let at = self.elapsed();
        self.metrics.push_incumbent(at, c);
        true
    }

    /// Limit status to stop with, checked between expansions.
    pub fn limit_hit(&self, stored: usize) -> Option<Status> {
        if let Some(cap) = self.limits.expansion_cap {
            if self.metrics.expansions >= cap {
                return Some(Status::ExpansionLimit);
            }
        }
        if let Some(t) = self.limits.time_limit {
            if self.started.elapsed() >= t {
                return Some(Status::TimeLimit);
            }
        }
        if let Some(m) = self.limits.memory_limit {
            if stored.saturating_mul(size_of::<Node<M>>() + NODE_OVERHEAD) > m {
                return Some(Status::MemoryLimit);
            }
        }
        None
    }

    /// Generates the successors of node `id`, with their propagated bounds
    /// when propagation is on.
    pub fn expand(&mut self, id: usize) -> Result<Expanded<M::State, M::Label>, SearchError> {
        let node = &self.nodes[id];
        let Some(adapter) = self.adapter.as_deref_mut().filter(|_| self.mode != PropagationMode::Off) else {
            self.metrics.expansions += 1;
            let succ = self.model.successors(&node.state);
            return Ok(Expanded::Successors(succ.into_iter().map(|s| (s, Cost::ZERO)).collect()));
        };
        let g = node.g;
        let out = gen_succ_propagation(self.model, adapter, &node.state, g, self.primal, self.mode)?;
        self.metrics.propagation_calls += 1;
        self.metrics.propagation_time += out.elapsed;
        if id == 0 {
            let bound = g.checked_add(out.cp_dual)?;
            if bound > self.root_dual {
                self.root_dual = bound;
            }
            self.raise_dual(bound.min(self.primal));
        }
        if out.pruned {
            self.metrics.pruned_by_cp += 1;
            return Ok(Expanded::Pruned);
        }
        self.metrics.expansions += 1;
        Ok(Expanded::Successors(out.successors))
    }

    pub fn finish(mut self, status: Status) -> Result<SolveResult<M::Label>, SearchError> {
        match status {
            Status::Optimal => {
                let p = self.primal;
                self.raise_dual(p);
            }
            Status::Infeasible => self.best_dual = Cost::Infinity,
            _ => {}
        }
        self.metrics.final_gap = match status {
            Status::Infeasible => 0.0,
            _ => optimality_gap(self.incumbent.as_ref().map(|i| i.cost), self.best_dual)?,
        };
        self.metrics.wall_time = self.elapsed();
        Ok(SolveResult {
            status,
            incumbent: self.incumbent,
            root_dual: self.root_dual,
            best_dual: self.best_dual,
            metrics: self.metrics,
        })
    }
}
