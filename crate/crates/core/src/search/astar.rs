use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::engine::{Engine, Expanded};
use super::{PropagationMode, Registry, SearchError, SolveLimits, SolveResult, Status};
use crate::cost::Cost;
use crate::cp::PropagationAdapter;
use crate::model::DpModel;

/// Best-first search on `f = g + h`. Ties go to the larger `g`, then to the
/// earlier insertion.
pub fn astar<M, A>(
    model: &M,
    adapter: Option<&mut A>,
    limits: &SolveLimits,
    mode: PropagationMode,
) -> Result<SolveResult<M::Label>, SearchError>
where
    M: DpModel,
    A: PropagationAdapter<M>,
{
    let mut eng = Engine::new(model, adapter, limits, mode)?;
    let mut registry = Registry::<M>::new();
    let root = eng.root()?;
    if eng.nodes[root].f.is_infinite() {
        return eng.finish(Status::Infeasible);
    }
    registry.insert(model, &eng.nodes[root].state, eng.nodes[root].g, root);

    type Key = Reverse<(Cost, Reverse<Cost>, u64, usize)>;
    let mut open: BinaryHeap<Key> = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((eng.nodes[root].f, Reverse(eng.nodes[root].g), seq, root)));

    let status = loop {
        let Some(Reverse((f, Reverse(g), _, id))) = open.pop() else {
            break if eng.incumbent.is_some() { Status::Optimal } else { Status::Infeasible };
        };
        if !eng.nodes[id].alive {
            eng.metrics.stale_skips += 1;
            continue;
        }
        if f >= eng.primal {
            break Status::Optimal;
        }
        let bound = f;
        eng.raise_dual(bound);
        if model.is_base(&eng.nodes[id].state) {
            eng.metrics.base_pops += 1;
            eng.offer_solution(f, id, None);
            continue;
        }
        if let Some(s) = eng.limit_hit(eng.nodes.len() + registry.len()) {
            break s;
        }
        let successors = match eng.expand(id)? {
            Expanded::Pruned => continue,
            Expanded::Successors(s) => s,
        };
        for (succ, cp_dual) in successors {
            eng.metrics.generated += 1;
            let g2 = g.checked_add(succ.weight)?;
            let f2 = g2.checked_add(eng.heuristic(&succ.state, cp_dual))?;
            if f2.is_infinite() || f2 > eng.primal {
                continue;
            }
            let nid = eng.nodes.len();
            let ins = registry.insert(model, &succ.state, g2, nid);
            if !ins.inserted {
                continue;
            }
            for r in ins.removed {
                eng.nodes[r].alive = false;
            }
            eng.push_node(succ.state, g2, f2, Some(id), Some(succ.label));
            seq += 1;
            open.push(Reverse((f2, Reverse(g2), seq, nid)));
        }
    };
    eng.finish(status)
}
