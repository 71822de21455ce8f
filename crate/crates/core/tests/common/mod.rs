//! Random instances and exhaustive oracles shared by the integration tests.
//! The oracles work from the problem definitions directly and share no code
//! with the models.
#![allow(dead_code)]

use dpcp_core::cp::PropagationAdapter;
use dpcp_core::models::rcpsp::{RcpspInstance, RcpspTask};
use dpcp_core::models::smswt::{generate, SmsGeneratorConfig, SmsInstance};
use dpcp_core::models::tsptw::TsptwInstance;
use dpcp_core::search::{astar, cabs, BeamConfig, PropagationMode, SolveLimits, SolveResult};
use dpcp_core::DpModel;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MODES: [PropagationMode; 3] = [PropagationMode::Off, PropagationMode::Once, PropagationMode::FixPoint];

pub const TAUS: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
pub const RHOS: [f64; 3] = [0.05, 0.25, 0.5];
pub const PHIS: [f64; 5] = [0.9, 1.05, 1.2, 1.35, 1.5];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One instance from a random point of the generator grid.
pub fn random_sms(rng: &mut ChaCha8Rng, n: usize) -> SmsInstance {
    let cfg = SmsGeneratorConfig {
        n,
        tau: *TAUS.choose(rng).unwrap(),
        rho: *RHOS.choose(rng).unwrap(),
        phi: *PHIS.choose(rng).unwrap(),
        seed: rng.random(),
        count: 1,
    };
    generate(&cfg).unwrap().remove(0)
}

/// Minimum weighted tardiness over all job orders, each job starting as
/// soon as the machine is free and the job is released.
pub fn sms_oracle(inst: &SmsInstance) -> Option<u64> {
    fn go(inst: &SmsInstance, used: &mut [bool], t: i64, cost: i64, best: &mut Option<i64>) {
        if used.iter().all(|&u| u) {
            *best = Some(best.map_or(cost, |b| b.min(cost)));
            return;
        }
        for j in 0..used.len() {
            if used[j] {
                continue;
            }
            let job = &inst.jobs[j];
            let end = t.max(job.r) + job.p;
            if end > job.deadline {
                continue;
            }
            used[j] = true;
            go(inst, used, end, cost + job.w * (end - job.d).max(0), best);
            used[j] = false;
        }
    }
    let mut best = None;
    go(inst, &mut vec![false; inst.n], 0, 0, &mut best);
    best.map(|b| b as u64)
}

/// Random travel times (some arcs missing) with windows built around a random
/// tour; roughly a quarter of the instances get squeezed windows.
pub fn random_tsptw(rng: &mut ChaCha8Rng, n: usize) -> TsptwInstance {
    let pts: Vec<(i64, i64)> = (0..n).map(|_| (rng.random_range(0..20), rng.random_range(0..20))).collect();
    let c: Vec<Vec<Option<i64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Some(0)
                    } else if rng.random_bool(0.05) {
                        None
                    } else {
                        let d = (pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs();
                        Some(d + rng.random_range(0..3))
                    }
                })
                .collect()
        })
        .collect();
    let mut tour: Vec<usize> = (1..n).collect();
    tour.shuffle(rng);
    let squeeze = rng.random_bool(0.25);
    let mut windows = vec![(0, 0); n];
    windows[0] = (0, 1000);
    let (mut at, mut t) = (0usize, 0i64);
    for &j in &tour {
        t += c[at][j].unwrap_or(10);
        let (lo, hi) = if squeeze { (0, 4) } else { (5, 25) };
        let r = (t - rng.random_range(lo..=hi)).max(0);
        let d = t + rng.random_range(lo..=hi);
        windows[j] = (r, d);
        at = j;
    }
    TsptwInstance { n, c, windows }
}

/// Cheapest tour over all visit orders. Waiting for a window to open is free;
/// a missing arc can't be used; the return to the depot has no window.
pub fn tsptw_oracle(inst: &TsptwInstance) -> Option<u64> {
    fn go(inst: &TsptwInstance, left: &[usize], at: usize, t: i64, cost: i64, best: &mut Option<i64>) {
        if left.is_empty() {
            let back = if at == 0 { Some(0) } else { inst.c[at][0] };
            if let Some(b) = back {
                *best = Some(best.map_or(cost + b, |x| x.min(cost + b)));
            }
            return;
        }
        for (k, &j) in left.iter().enumerate() {
            let Some(c) = inst.c[at][j] else { continue };
            let arrive = (t + c).max(inst.windows[j].0);
            if arrive > inst.windows[j].1 {
                continue;
            }
            let rest: Vec<usize> = left.iter().enumerate().filter(|&(q, _)| q != k).map(|(_, &v)| v).collect();
            go(inst, &rest, j, arrive, cost + c, best);
        }
    }
    let left: Vec<usize> = (1..inst.n).collect();
    let mut best = None;
    go(inst, &left, 0, 0, 0, &mut best);
    best.map(|b| b as u64)
}

/// Random acyclic precedences (edges go from lower to higher index) and
/// usages within capacity.
pub fn random_rcpsp(rng: &mut ChaCha8Rng, n: usize, resources: usize) -> RcpspInstance {
    let capacities: Vec<i64> = (0..resources).map(|_| rng.random_range(1..=4)).collect();
    let tasks = (0..n)
        .map(|_| RcpspTask {
            p: rng.random_range(1..=6),
            u: capacities.iter().map(|&c| rng.random_range(0..=c)).collect(),
        })
        .collect();
    let mut precedences = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.15) {
                precedences.push((i, j));
            }
        }
    }
    RcpspInstance {
        tasks,
        capacities,
        precedences,
    }
}

/// Optimal makespan: every precedence-feasible order is turned into a
/// schedule by placing each task at its earliest start given the tasks
/// already placed (resource profile checked time unit by time unit). These
/// schedules include an optimal one.
pub fn rcpsp_oracle(inst: &RcpspInstance) -> Option<i64> {
    let n = inst.tasks.len();
    if inst
        .tasks
        .iter()
        .any(|t| t.u.iter().zip(&inst.capacities).any(|(u, c)| u > c))
    {
        return None;
    }
    let horizon: i64 = inst.tasks.iter().map(|t| t.p).sum();
    let mut preds = vec![Vec::new(); n];
    for &(i, j) in &inst.precedences {
        preds[j].push(i);
    }

    fn go(
        inst: &RcpspInstance,
        preds: &[Vec<usize>],
        load: &mut Vec<Vec<i64>>,
        start: &mut [Option<i64>],
        makespan: i64,
        best: &mut i64,
    ) {
        if makespan >= *best {
            return;
        }
        if start.iter().all(Option::is_some) {
            *best = makespan;
            return;
        }
        for j in 0..start.len() {
            if start[j].is_some() || preds[j].iter().any(|&i| start[i].is_none()) {
                continue;
            }
            let t = &inst.tasks[j];
            let ready = preds[j].iter().map(|&i| start[i].unwrap() + inst.tasks[i].p).max().unwrap_or(0);
            let mut s = ready;
            while !(s..s + t.p).all(|x| {
                (0..inst.capacities.len()).all(|r| load[r][x as usize] + t.u[r] <= inst.capacities[r])
            }) {
                s += 1;
            }
            for r in 0..inst.capacities.len() {
                for x in s..s + t.p {
                    load[r][x as usize] += t.u[r];
                }
            }
            start[j] = Some(s);
            go(inst, preds, load, start, makespan.max(s + t.p), best);
            start[j] = None;
            for r in 0..inst.capacities.len() {
                for x in s..s + t.p {
                    load[r][x as usize] -= t.u[r];
                }
            }
        }
    }
    let mut load = vec![vec![0i64; 2 * horizon as usize + 1]; inst.capacities.len()];
    let mut start = vec![None; n];
    let mut best = horizon + 1;
    go(inst, &preds, &mut load, &mut start, 0, &mut best);
    Some(best)
}

pub struct Run<L> {
    pub algo: &'static str,
    pub mode: PropagationMode,
    pub result: SolveResult<L>,
}

/// Solves with both algorithms under every propagation mode.
pub fn solve_everywhere<M, A>(model: &M, mut adapter: impl FnMut() -> A) -> Vec<Run<M::Label>>
where
    M: DpModel,
    A: PropagationAdapter<M>,
{
    let limits = SolveLimits::default();
    let mut out = Vec::new();
    for mode in MODES {
        let mut a = adapter();
        let a_ref = (mode != PropagationMode::Off).then_some(&mut a);
        let result = astar(model, a_ref, &limits, mode).expect("astar runs");
        out.push(Run { algo: "astar", mode, result });
        let mut a = adapter();
        let a_ref = (mode != PropagationMode::Off).then_some(&mut a);
        let result = cabs(model, a_ref, &limits, &BeamConfig::default(), mode).expect("cabs runs");
        out.push(Run { algo: "cabs", mode, result });
    }
    out
}
