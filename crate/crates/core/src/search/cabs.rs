use std::cmp::Reverse;

use super::engine::{Engine, Expanded};
use super::{BeamConfig, PropagationMode, Registry, SearchError, SolveLimits, SolveResult, Status};
use crate::cp::PropagationAdapter;
use crate::model::DpModel;

/// Complete anytime beam search: beam passes of width
/// `initial_width * growth_factor^k` until a pass finishes without cutting
/// any node, which proves the incumbent optimal (or the model infeasible).
/// Expansions accumulate over passes.
pub fn cabs<M, A>(
    model: &M,
    adapter: Option<&mut A>,
    limits: &SolveLimits,
    beam: &BeamConfig,
    mode: PropagationMode,
) -> Result<SolveResult<M::Label>, SearchError>
where
    M: DpModel,
    A: PropagationAdapter<M>,
{
    if beam.initial_width < 1 || beam.growth_factor < 2 {
        return Err(SearchError::InvalidBeam);
    }
    let mut eng = Engine::new(model, adapter, limits, mode)?;
    let mut width = beam.initial_width;

    let status = 'passes: loop {
        eng.nodes.clear();
        let root = eng.root()?;
        eng.metrics.beam_widths.push(width);
        if eng.nodes[root].f.is_infinite() {
            break Status::Infeasible;
        }
        if model.is_base(&eng.nodes[root].state) {
            eng.metrics.base_pops += 1;
            let f = eng.nodes[root].f;
            eng.offer_solution(f, root, None);
            break Status::Optimal;
        }
        let mut registry = Registry::<M>::new();
        registry.insert(model, &eng.nodes[root].state, eng.nodes[root].g, root);

        let mut layer = vec![root];
        let mut complete = true;
        while !layer.is_empty() {
            let mut next = Vec::new();
            for &id in &layer {
                if !eng.nodes[id].alive {
                    eng.metrics.stale_skips += 1;
                    continue;
                }
                if eng.nodes[id].f >= eng.primal {
                    continue;
                }
                if let Some(s) = eng.limit_hit(eng.nodes.len() + registry.len()) {
                    break 'passes s;
                }
                let successors = match eng.expand(id)? {
                    Expanded::Pruned => continue,
                    Expanded::Successors(s) => s,
                };
                let g = eng.nodes[id].g;
                for (succ, cp_dual) in successors {
                    eng.metrics.generated += 1;
                    let g2 = g.checked_add(succ.weight)?;
                    let f2 = g2.checked_add(eng.heuristic(&succ.state, cp_dual))?;
                    if f2.is_infinite() || f2 > eng.primal {
                        continue;
                    }
                    if model.is_base(&succ.state) {
                        eng.offer_solution(f2, id, Some(succ.label));
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
                    next.push(nid);
                }
            }
            next.retain(|&i| eng.nodes[i].alive);
            next.sort_by_key(|&i| (eng.nodes[i].f, Reverse(eng.nodes[i].g), i));
            if next.len() > width {
                complete = false;
                next.truncate(width);
            }
            layer = next;
        }
        if complete {
            break if eng.incumbent.is_some() { Status::Optimal } else { Status::Infeasible };
        }
        width = width.saturating_mul(beam.growth_factor);
    };
    eng.finish(status)
}
