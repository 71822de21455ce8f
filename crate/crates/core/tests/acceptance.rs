//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use common::*;
use dpcp_core::cp::{
    ect_envelope, propagate_fixpoint, BuildContext, DisjunctiveItem, Domain, DomainStore, CumulativeTask,
    EnvelopeTask, PropagationAdapter, Propagator, VarId,
};
use dpcp_core::io::{self, Format, Instance, ProblemKind};
use dpcp_core::metrics::optimality_gap;
use dpcp_core::models::rcpsp::{RcpspAdapter, RcpspInstance, RcpspModel, RcpspOptions};
use dpcp_core::models::smswt::{generate, SmsAdapter, SmsGeneratorConfig, SmsInstance, SmsModel};
use dpcp_core::models::tsptw::{TsptwAdapter, TsptwInstance, TsptwModel};
use dpcp_core::oracle::Oracle;
use dpcp_core::search::{cabs, gen_succ_propagation, BeamConfig, PropagationMode, SolveLimits, Status};
use dpcp_core::{evaluate_solution, Cost, DpModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn sms_instances() -> Vec<SmsInstance> {
    let mut rng = rng(1001);
    (0..200)
        .map(|_| {
            let n = rng.random_range(2..=8);
            random_sms(&mut rng, n)
        })
        .collect()
}

fn tsptw_instances() -> Vec<TsptwInstance> {
    let mut rng = rng(2002);
    (0..200)
        .map(|_| {
            let n = rng.random_range(3..=9);
            random_tsptw(&mut rng, n)
        })
        .collect()
}

fn rcpsp_instances() -> Vec<RcpspInstance> {
    let mut rng = rng(3003);
    (0..100)
        .map(|_| {
            let n = rng.random_range(2..=8);
            let res = rng.random_range(1..=2);
            random_rcpsp(&mut rng, n, res)
        })
        .collect()
}

/// Every run proves the oracle's answer and its reported labels replay to
/// the reported cost.
fn match_oracle<M: DpModel>(model: &M, runs: &[Run<M::Label>], expected: Option<u64>, tag: &str) -> Result<(), String> {
    for run in runs {
        let r = &run.result;
        let what = format!("{tag} {} {:?}", run.algo, run.mode);
        match expected {
            None => ensure!(r.status == Status::Infeasible, "{what}: expected infeasible, got {:?}", r.status),
            Some(v) => {
                ensure!(r.status == Status::Optimal, "{what}: status {:?}", r.status);
                ensure!(r.cost() == Some(v), "{what}: cost {:?}, oracle {v}", r.cost());
                let labels = &r.incumbent.as_ref().unwrap().labels;
                let replay = evaluate_solution(model, labels).map_err(|e| format!("{what}: {e}"))?;
                ensure!(replay == Cost::Finite(v), "{what}: labels replay to {replay}");
            }
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let mut infeasible = 0;
    for (k, inst) in sms_instances().into_iter().enumerate() {
        let expected = sms_oracle(&inst);
        infeasible += usize::from(expected.is_none());
        let model = SmsModel::new(inst).map_err(|e| e.to_string())?;
        let runs = solve_everywhere(&model, || SmsAdapter::new(&model));
        match_oracle(&model, &runs, expected, &format!("sms #{k}"))?;
    }
    Ok(format!("200 instances x 6 configurations, {infeasible} infeasible"))
}

fn criterion_2() -> Outcome {
    let mut infeasible = 0;
    for (k, inst) in tsptw_instances().into_iter().enumerate() {
        let expected = tsptw_oracle(&inst);
        infeasible += usize::from(expected.is_none());
        let model = TsptwModel::new(inst).map_err(|e| e.to_string())?;
        let runs = solve_everywhere(&model, || TsptwAdapter::new(&model));
        match_oracle(&model, &runs, expected, &format!("tsptw #{k}"))?;
    }
    ensure!((20..=90).contains(&infeasible), "{infeasible}/200 infeasible, expected roughly a quarter");
    Ok(format!("200 instances x 6 configurations, {infeasible} infeasible"))
}

fn criterion_3() -> Outcome {
    for (k, inst) in rcpsp_instances().into_iter().enumerate() {
        let expected = rcpsp_oracle(&inst).map(|v| v as u64);
        let model = RcpspModel::new(inst, RcpspOptions::default()).map_err(|e| e.to_string())?;
        let runs = solve_everywhere(&model, || RcpspAdapter::new(&model));
        match_oracle(&model, &runs, expected, &format!("rcpsp #{k}"))?;
    }
    Ok("100 instances x 6 configurations".into())
}

/// Random domain over small non-negative values: an interval or a set with
/// holes, at most 12 values.
fn random_domain(rng: &mut ChaCha8Rng, store: &mut DomainStore) -> VarId {
    let size = rng.random_range(1..=12);
    if rng.random_bool(0.5) {
        let lb = rng.random_range(0..=10);
        store.add_interval(lb, lb + size - 1)
    } else {
        let values: Vec<i64> = (0..size).map(|_| rng.random_range(0..=16)).collect();
        store.add_set(values)
    }
}

fn for_each_assignment(domains: &[Domain], f: &mut impl FnMut(&[i64])) {
    fn go(domains: &[Domain], at: usize, cur: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
        if at == domains.len() {
            f(cur);
            return;
        }
        for v in domains[at].values() {
            cur.push(v);
            go(domains, at + 1, cur, f);
            cur.pop();
        }
    }
    go(domains, 0, &mut Vec::new(), f);
}

/// Propagates once and to fixpoint, then checks that every solution of the
/// original domains survives and that solvable models are not reported
/// infeasible.
fn check_sound(store: &DomainStore, prop: &Propagator, holds: impl Fn(&[i64]) -> bool) -> Result<usize, String> {
    let mut solutions = Vec::new();
    for_each_assignment(store.domains(), &mut |a| {
        if holds(a) {
            solutions.push(a.to_vec());
        }
    });
    let mut once = store.clone();
    prop.propagate(&mut once);
    let mut fix = store.clone();
    propagate_fixpoint(&mut fix, std::slice::from_ref(prop));
    for (name, after) in [("once", &once), ("fixpoint", &fix)] {
        if solutions.is_empty() {
            continue;
        }
        ensure!(!after.is_infeasible(), "{prop:?} ({name}) reported infeasible but {} solutions exist", solutions.len());
        for sol in &solutions {
            for (i, &v) in sol.iter().enumerate() {
                ensure!(after.contains(VarId(i), v), "{prop:?} ({name}) pruned {v} from var {i}, solution {sol:?}");
            }
        }
    }
    Ok(solutions.len())
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4004);
    let mut solved = [0usize; 4];
    for _ in 0..1000 {
        // disjunctive with fixed and variable durations
        let mut s = DomainStore::new();
        let vars: Vec<VarId> = (0..rng.random_range(1..=5)).map(|_| random_domain(&mut rng, &mut s)).collect();
        let mut items = Vec::new();
        let mut k = 0;
        while k < vars.len() {
            if k + 1 < vars.len() && rng.random_bool(0.3) {
                items.push(DisjunctiveItem::variable(vars[k], vars[k + 1]));
                k += 2;
            } else {
                items.push(DisjunctiveItem::fixed(vars[k], rng.random_range(0..=5)));
                k += 1;
            }
        }
        let spec = items.clone();
        let prop = Propagator::Disjunctive(items);
        let ok = check_sound(&s, &prop, |a| {
            let iv: Vec<(i64, i64)> = spec
                .iter()
                .map(|it| {
                    let p = match it.duration {
                        dpcp_core::cp::DurationSpec::Fixed(p) => p,
                        dpcp_core::cp::DurationSpec::Var(v) => a[v.0],
                    };
                    (a[it.start.0], p)
                })
                .collect();
            iv.iter().enumerate().all(|(i, &(si, pi))| {
                iv[i + 1..]
                    .iter()
                    .all(|&(sj, pj)| pi == 0 || pj == 0 || si + pi <= sj || sj + pj <= si)
            })
        })?;
        solved[0] += usize::from(ok > 0);

        // cumulative
        let mut s = DomainStore::new();
        let tasks: Vec<CumulativeTask> = (0..rng.random_range(1..=5))
            .map(|_| CumulativeTask {
                start: random_domain(&mut rng, &mut s),
                duration: rng.random_range(0..=5),
                usage: rng.random_range(0..=3),
            })
            .collect();
        let capacity = rng.random_range(1..=4);
        let spec = tasks.clone();
        let prop = Propagator::Cumulative { tasks, capacity };
        let ok = check_sound(&s, &prop, |a| {
            (0..40).all(|x| {
                spec.iter()
                    .filter(|t| a[t.start.0] <= x && x < a[t.start.0] + t.duration)
                    .map(|t| t.usage)
                    .sum::<i64>()
                    <= capacity
            }) && spec.iter().all(|t| t.duration == 0 || t.usage <= capacity)
        })?;
        solved[1] += usize::from(ok > 0);

        // precedence
        let mut s = DomainStore::new();
        let before = random_domain(&mut rng, &mut s);
        let after = random_domain(&mut rng, &mut s);
        let offset = rng.random_range(-3..=6);
        let prop = Propagator::PrecedenceLe { before, offset, after };
        let ok = check_sound(&s, &prop, |a| a[before.0] + offset <= a[after.0])?;
        solved[2] += usize::from(ok > 0);

        // capped sum
        let mut s = DomainStore::new();
        let terms: Vec<VarId> = (0..rng.random_range(1..=5)).map(|_| random_domain(&mut rng, &mut s)).collect();
        let cap = rng.random_bool(0.9).then(|| rng.random_range(0..=40));
        let spec = terms.clone();
        let prop = Propagator::SumLe { terms, cap };
        let ok = check_sound(&s, &prop, |a| cap.is_none_or(|c| spec.iter().map(|v| a[v.0]).sum::<i64>() <= c))?;
        solved[3] += usize::from(ok > 0);
    }
    Ok(format!(
        "1000 models per propagator; solvable: disjunctive {}, cumulative {}, precedence {}, sum {}",
        solved[0], solved[1], solved[2], solved[3]
    ))
}

/// Runs the exact recursion from the target and hands every state with a
/// finite value to `check`.
fn each_valued_state<M: DpModel>(
    model: &M,
    depth: usize,
    mut check: impl FnMut(&M::State, u64) -> Result<(), String>,
) -> Result<usize, String> {
    let mut oracle = Oracle::new(model, depth);
    oracle.value(&model.target()).map_err(|e| e.to_string())?;
    let mut count = 0;
    for (state, v) in oracle.table() {
        if let Cost::Finite(v) = *v {
            check(state, v)?;
            count += 1;
        }
    }
    Ok(count)
}

/// Builds and propagates the constraint model of `state` with no incumbent.
fn propagated<M: DpModel, A: PropagationAdapter<M>>(adapter: &mut A, state: &M::State) -> Result<DomainStore, String> {
    let cp = adapter
        .build(state, BuildContext { g: Cost::ZERO, primal: Cost::Infinity })
        .map_err(|e| e.to_string())?;
    let mut store = cp.store;
    propagate_fixpoint(&mut store, &cp.propagators);
    ensure!(!adapter.is_infeasible(state, &store), "propagation refuted a state of finite value: {state:?}");
    Ok(store)
}

fn criterion_5() -> Outcome {
    let mut states = 0;
    for inst in sms_instances() {
        let n = inst.n;
        let model = SmsModel::new(inst).map_err(|e| e.to_string())?;
        let mut adapter = SmsAdapter::new(&model);
        states += each_valued_state(&model, n + 1, |s, v| {
            ensure!(model.dual(s) <= Cost::Finite(v), "sms dual {} > {v} at {s:?}", model.dual(s));
            let store = propagated(&mut adapter, s)?;
            let cp = adapter.dual_cp(s, &store);
            ensure!(cp <= Cost::Finite(v), "sms propagated dual {cp} > {v} at {s:?}");
            Ok(())
        })?;
    }
    for inst in rcpsp_instances() {
        let n = inst.tasks.len();
        let model = RcpspModel::new(inst, RcpspOptions::default()).map_err(|e| e.to_string())?;
        let mut adapter = RcpspAdapter::new(&model);
        states += each_valued_state(&model, n + 1, |s, v| {
            let total = model.makespan_estimate(s) + v as i64;
            let (critical, energy) = model.makespan_bounds(s);
            ensure!(critical <= total, "rcpsp critical path {critical} > {total} at {s:?}");
            ensure!(energy <= total, "rcpsp energy {energy} > {total} at {s:?}");
            let store = propagated(&mut adapter, s)?;
            let (envelope, finish) = adapter.makespan_bounds_cp(s, &store);
            ensure!(envelope <= total, "rcpsp envelope {envelope} > {total} at {s:?}");
            ensure!(finish <= total, "rcpsp latest earliest finish {finish} > {total} at {s:?}");
            ensure!(model.dual(s) <= Cost::Finite(v), "rcpsp dual above value at {s:?}");
            ensure!(adapter.dual_cp(s, &store) <= Cost::Finite(v), "rcpsp propagated dual above value at {s:?}");
            Ok(())
        })?;
    }
    for inst in tsptw_instances() {
        let n = inst.n;
        let model = TsptwModel::new(inst).map_err(|e| e.to_string())?;
        let mut adapter = TsptwAdapter::new(&model);
        states += each_valued_state(&model, n + 1, |s, v| {
            let (to, from) = model.bound_terms(s);
            ensure!(to <= Cost::Finite(v) && from <= Cost::Finite(v), "tsptw bounds {to}/{from} > {v} at {s:?}");
            let store = propagated(&mut adapter, s)?;
            let cp = adapter.dual_cp(s, &store);
            ensure!(cp <= Cost::Finite(v), "tsptw propagated dual {cp} > {v} at {s:?}");
            Ok(())
        })?;
    }
    Ok(format!("{states} states checked"))
}

fn median(mut v: Vec<u64>) -> f64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        (v[m - 1] + v[m]) as f64 / 2.0
    } else {
        v[m] as f64
    }
}

fn criterion_6() -> Outcome {
    let cfg = SmsGeneratorConfig {
        n: 12,
        tau: 0.4,
        rho: 0.05,
        phi: 0.9,
        seed: 6006,
        count: 50,
    };
    let instances = generate(&cfg).map_err(|e| e.to_string())?;
    let limits = SolveLimits::default();
    let beam = BeamConfig::default();
    let (mut off, mut once) = (Vec::new(), Vec::new());
    let mut refuted = 0;
    for (k, inst) in instances.into_iter().enumerate() {
        let model = SmsModel::new(inst).map_err(|e| e.to_string())?;
        let plain = cabs::<_, SmsAdapter>(&model, None, &limits, &beam, PropagationMode::Off).map_err(|e| e.to_string())?;
        let mut adapter = SmsAdapter::new(&model);
        let prop = cabs(&model, Some(&mut adapter), &limits, &beam, PropagationMode::Once).map_err(|e| e.to_string())?;
        ensure!(plain.status.is_proven() && prop.status.is_proven(), "instance {k} not solved");
        ensure!(plain.cost() == prop.cost(), "instance {k}: {:?} vs {:?}", plain.cost(), prop.cost());

        let mut adapter = SmsAdapter::new(&model);
        let root = gen_succ_propagation(
            &model,
            &mut adapter,
            &model.target(),
            model.initial_cost(),
            Cost::Infinity,
            PropagationMode::Once,
        )
        .map_err(|e| e.to_string())?;
        if root.pruned {
            refuted += 1;
            ensure!(prop.status == Status::Infeasible, "instance {k}: refuted root but status {:?}", prop.status);
            ensure!(prop.metrics.expansions == 0, "instance {k}: refuted root but {} expansions", prop.metrics.expansions);
        }
        off.push(plain.metrics.expansions);
        once.push(prop.metrics.expansions);
    }
    let (m_off, m_once) = (median(off), median(once));
    ensure!(m_once <= m_off, "median expansions with propagation {m_once} > without {m_off}");
    Ok(format!("median expansions off {m_off}, once {m_once}; {refuted} refuted at the root"))
}

fn criterion_7() -> Outcome {
    ensure!(optimality_gap(Some(100), Cost::Finite(75)) == Ok(0.25), "(100, 75)");
    ensure!(optimality_gap(Some(0), Cost::Finite(0)) == Ok(0.0), "(0, 0)");
    ensure!(optimality_gap(None, Cost::Finite(40)) == Ok(1.0), "no primal");
    ensure!(optimality_gap(None, Cost::Infinity) == Ok(1.0), "no primal, infinite dual");
    ensure!(optimality_gap(Some(10), Cost::Finite(11)).is_err(), "dual above primal accepted");
    Ok("5 cases".into())
}

fn criterion_8() -> Outcome {
    let mut traced = 0;
    for (k, inst) in sms_instances().into_iter().enumerate() {
        let model = SmsModel::new(inst).map_err(|e| e.to_string())?;
        let runs = solve_everywhere(&model, || SmsAdapter::new(&model));
        for mode in MODES {
            let pick = |algo: &str| runs.iter().find(|r| r.algo == algo && r.mode == mode).unwrap();
            let (a, c) = (pick("astar"), pick("cabs"));
            ensure!(a.result.cost() == c.result.cost(), "#{k} {mode:?}: A* {:?}, CABS {:?}", a.result.cost(), c.result.cost());
            ensure!(a.result.status == c.result.status, "#{k} {mode:?}: statuses differ");
            let trace = &c.result.metrics.incumbent_trace;
            for w in trace.windows(2) {
                ensure!(w[1].1 < w[0].1 && w[1].0 >= w[0].0, "#{k} {mode:?}: trace not strictly improving {trace:?}");
            }
            ensure!(trace.last().map(|t| t.1) == c.result.cost(), "#{k} {mode:?}: trace does not end at the answer");
            traced += usize::from(trace.len() > 1);
        }
    }
    Ok(format!("600 CABS runs agree with A*; {traced} improved their incumbent more than once"))
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9009);
    for k in 0..1000 {
        let capacity = rng.random_range(1..=5);
        let tasks: Vec<EnvelopeTask> = (0..rng.random_range(0..=10))
            .map(|_| EnvelopeTask {
                lb_start: rng.random_range(0..=20),
                duration: rng.random_range(0..=6),
                usage: rng.random_range(0..=capacity),
            })
            .collect();
        let mut brute = 0i64;
        for mask in 1u32..(1 << tasks.len()) {
            let omega: Vec<&EnvelopeTask> = (0..tasks.len()).filter(|i| mask >> i & 1 == 1).map(|i| &tasks[i]).collect();
            let lb = omega.iter().map(|t| t.lb_start).min().unwrap();
            let energy: i64 = omega.iter().map(|t| t.usage * t.duration).sum();
            let num = capacity * lb + energy;
            brute = brute.max((num + capacity - 1).div_euclid(capacity));
        }
        let got = ect_envelope(&tasks, capacity);
        ensure!(got == brute, "input #{k}: {got} vs {brute} for {tasks:?} cap {capacity}");
    }
    Ok("1000 inputs".into())
}

fn solve_instance(inst: &Instance) -> Result<Option<u64>, String> {
    let limits = SolveLimits::default();
    let mode = PropagationMode::FixPoint;
    let r = match inst {
        Instance::Rcpsp(i) => {
            let model = RcpspModel::new(i.clone(), RcpspOptions::default()).map_err(|e| e.to_string())?;
            let mut a = RcpspAdapter::new(&model);
            cabs(&model, Some(&mut a), &limits, &BeamConfig::default(), mode).map(|r| (r.status, r.cost()))
        }
        Instance::Tsptw(i) => {
            let model = TsptwModel::new(i.clone()).map_err(|e| e.to_string())?;
            let mut a = TsptwAdapter::new(&model);
            cabs(&model, Some(&mut a), &limits, &BeamConfig::default(), mode).map(|r| (r.status, r.cost()))
        }
        Instance::Smswt(i) => {
            let model = SmsModel::new(i.clone()).map_err(|e| e.to_string())?;
            let mut a = SmsAdapter::new(&model);
            cabs(&model, Some(&mut a), &limits, &BeamConfig::default(), mode).map(|r| (r.status, r.cost()))
        }
    }
    .map_err(|e| e.to_string())?;
    ensure!(r.0.is_proven(), "not solved: {:?}", r.0);
    Ok(r.1)
}

fn criterion_10() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut report = Vec::new();
    for (file, kind, oracle) in [
        ("j4_small.sm", ProblemKind::Rcpsp, None),
        ("tsptw_n5.txt", ProblemKind::Tsptw, Some(())),
    ] {
        let path = dir.join(file);
        let first = io::load(&path, kind, Format::Auto).map_err(|e| e.to_string())?;
        let json = first.to_json();
        let second = io::parse_json(kind, &json).map_err(|e| e.to_string())?;
        ensure!(first == second, "{file}: JSON round trip changed the instance");
        ensure!(second.to_json() == json, "{file}: canonical JSON is not stable");
        let (a, b) = (solve_instance(&first)?, solve_instance(&second)?);
        ensure!(a == b, "{file}: {a:?} before, {b:?} after the round trip");
        let expected = match (&first, oracle) {
            (Instance::Tsptw(i), Some(())) => tsptw_oracle(i),
            (Instance::Rcpsp(i), _) => rcpsp_oracle(i).map(|v| v as u64),
            _ => unreachable!(),
        };
        ensure!(a == expected, "{file}: solved {a:?}, oracle {expected:?}");
        report.push(format!("{file} -> {a:?}"));
    }
    Ok(report.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("SMS oracle equivalence", criterion_1),
        ("TSPTW oracle equivalence", criterion_2),
        ("RCPSP oracle equivalence", criterion_3),
        ("propagator soundness", criterion_4),
        ("bound admissibility", criterion_5),
        ("propagation reduces expansions", criterion_6),
        ("optimality gap", criterion_7),
        ("CABS anytime and completeness", criterion_8),
        ("envelope bound vs subsets", criterion_9),
        ("format round trip", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
