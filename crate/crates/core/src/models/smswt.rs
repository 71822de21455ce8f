//! `1 | r_i, δ_i | Σ w_i T_i`: jobs are sequenced one at a time, each
//! starting as soon as both the machine and its release date allow.

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, InstanceError};
use crate::cost::Cost;
use crate::cp::{AdapterError, BuildContext, CpModel, DisjunctiveItem, DomainStore, PropagationAdapter, Propagator, VarId};
use crate::model::{DpModel, Successor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmsJob {
    pub p: i64,
    pub r: i64,
    /// Due date.
    pub d: i64,
    /// Latest allowed completion.
    pub deadline: i64,
    pub w: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmsInstance {
    pub n: usize,
    pub jobs: Vec<SmsJob>,
}

impl SmsInstance {
    pub fn new(jobs: Vec<SmsJob>) -> Self {
        SmsInstance { n: jobs.len(), jobs }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.n != self.jobs.len() {
            return invalid(format!("n = {} but {} jobs listed", self.n, self.jobs.len()));
        }
        for (i, j) in self.jobs.iter().enumerate() {
            if j.p < 1 || j.r < 0 || j.d < 0 || j.deadline < 0 || j.w < 0 {
                return invalid(format!("job {i} has a negative field or zero duration"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmsState {
    pub unscheduled: FixedBitSet,
    pub time: i64,
}

/// Completion time of `job` when started as early as possible after `t`.
pub fn next_time(t: i64, job: &SmsJob) -> i64 {
    t.max(job.r) + job.p
}

#[derive(Debug, Clone)]
pub struct SmsModel {
    inst: SmsInstance,
}

impl SmsModel {
    pub fn new(inst: SmsInstance) -> Result<Self, InstanceError> {
        inst.validate()?;
        Ok(SmsModel { inst })
    }

    pub fn instance(&self) -> &SmsInstance {
        &self.inst
    }

    fn tardiness_cost(&self, i: usize, completion: i64) -> u64 {
        let j = &self.inst.jobs[i];
        (j.w * (completion - j.d).max(0)) as u64
    }
}

impl DpModel for SmsModel {
    type State = SmsState;
    type Label = usize;
    type Signature = FixedBitSet;

    fn target(&self) -> SmsState {
        let mut unscheduled = FixedBitSet::with_capacity(self.inst.n);
        unscheduled.insert_range(..);
        SmsState { unscheduled, time: 0 }
    }

    fn is_base(&self, s: &SmsState) -> bool {
        s.unscheduled.is_clear()
    }

    fn base_cost(&self, _: &SmsState) -> Cost {
        Cost::ZERO
    }

    fn successors(&self, s: &SmsState) -> Vec<Successor<SmsState, usize>> {
        let jobs = &self.inst.jobs;
        if s.unscheduled.ones().any(|i| next_time(s.time, &jobs[i]) > jobs[i].deadline) {
            return Vec::new();
        }
        s.unscheduled
            .ones()
            .map(|i| {
                let t = next_time(s.time, &jobs[i]);
                let mut unscheduled = s.unscheduled.clone();
                unscheduled.set(i, false);
                Successor {
                    weight: Cost::Finite(self.tardiness_cost(i, t)),
                    label: i,
                    state: SmsState { unscheduled, time: t },
                }
            })
            .collect()
    }

    fn dominates(&self, a: &SmsState, b: &SmsState) -> bool {
        a.time <= b.time
    }

    fn dual(&self, s: &SmsState) -> Cost {
        let total = s
            .unscheduled
            .ones()
            .map(|i| self.tardiness_cost(i, next_time(s.time, &self.inst.jobs[i])))
            .sum();
        Cost::Finite(total)
    }

    fn signature(&self, s: &SmsState) -> FixedBitSet {
        s.unscheduled.clone()
    }
}

/// Constraint model with one start variable per job (variable index = job
/// index) and a single disjunctive over the unscheduled jobs. Scheduled jobs
/// keep a `[0, 0]` placeholder and appear in no constraint.
pub struct SmsAdapter<'a> {
    model: &'a SmsModel,
}

impl<'a> SmsAdapter<'a> {
    pub fn new(model: &'a SmsModel) -> Self {
        SmsAdapter { model }
    }

    /// Earliest start of job `i` from `s` given `store`.
    fn start_lb(&self, s: &SmsState, store: &DomainStore, i: usize) -> i64 {
        let j = &self.model.inst.jobs[i];
        store.lb(VarId(i)).max(s.time).max(j.r)
    }
}

impl PropagationAdapter<SmsModel> for SmsAdapter<'_> {
    fn build(&mut self, s: &SmsState, _: BuildContext) -> Result<CpModel, AdapterError> {
        let jobs = &self.model.inst.jobs;
        let mut store = DomainStore::new();
        let mut items = Vec::new();
        for (i, j) in jobs.iter().enumerate() {
            if s.unscheduled.contains(i) {
                let v = store.add_interval(j.r.max(s.time), j.deadline - j.p);
                items.push(DisjunctiveItem::fixed(v, j.p));
            } else {
                store.add_interval(0, 0);
            }
        }
        Ok(CpModel {
            store,
            propagators: vec![Propagator::Disjunctive(items)],
        })
    }

    fn dual_cp(&self, s: &SmsState, store: &DomainStore) -> Cost {
        let total = s
            .unscheduled
            .ones()
            .map(|i| self.model.tardiness_cost(i, self.start_lb(s, store, i) + self.model.inst.jobs[i].p))
            .sum();
        Cost::Finite(total)
    }

    /// The job must be able to start right away, at `max(t, r)`.
    fn is_succ_infeasible(&self, s: &SmsState, succ: &Successor<SmsState, usize>, store: &DomainStore) -> bool {
        let j = &self.model.inst.jobs[succ.label];
        !store.contains(VarId(succ.label), s.time.max(j.r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmsGeneratorConfig {
    pub n: usize,
    pub tau: f64,
    pub rho: f64,
    pub phi: f64,
    pub seed: u64,
    pub count: usize,
}

impl SmsGeneratorConfig {
    pub fn validate(&self) -> Result<(), InstanceError> {
        if !(0.0..=1.0).contains(&self.tau) || self.rho <= 0.0 || self.phi <= 0.0 {
            return invalid("need tau in [0, 1] and positive rho, phi");
        }
        Ok(())
    }
}

/// Random instances: `p ∈ [1, 10]`, `r ∈ [0, τP]`, `d ∈ [r+p, r+p+ρP]`,
/// `δ ∈ [d, d+φP]`, `w ∈ [1, 10]` with `P = Σ p`. Real range ends are
/// truncated to integers. Per instance all durations are drawn first, then
/// every `r`, `d`, `δ` and `w` array in turn.
pub fn generate(config: &SmsGeneratorConfig) -> Result<Vec<SmsInstance>, InstanceError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n;
    let mut out = Vec::with_capacity(config.count);
    for _ in 0..config.count {
        let p: Vec<i64> = (0..n).map(|_| rng.random_range(1..=10)).collect();
        let total = p.iter().sum::<i64>() as f64;
        let (tau_p, rho_p, phi_p) = (
            (config.tau * total) as i64,
            (config.rho * total) as i64,
            (config.phi * total) as i64,
        );
        let r: Vec<i64> = (0..n).map(|_| rng.random_range(0..=tau_p)).collect();
        let d: Vec<i64> = (0..n)
            .map(|i| rng.random_range(r[i] + p[i]..=r[i] + p[i] + rho_p))
            .collect();
        let deadline: Vec<i64> = (0..n).map(|i| rng.random_range(d[i]..=d[i] + phi_p)).collect();
        let w: Vec<i64> = (0..n).map(|_| rng.random_range(1..=10)).collect();
        out.push(SmsInstance::new(
            (0..n)
                .map(|i| SmsJob {
                    p: p[i],
                    r: r[i],
                    d: d[i],
                    deadline: deadline[i],
                    w: w[i],
                })
                .collect(),
        ));
    }
    Ok(out)
}
