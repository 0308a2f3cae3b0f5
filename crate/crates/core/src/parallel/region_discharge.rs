//! Augmenting-path region discharge.
//!
//! Each block repeatedly discharges: it pushes as much of its excess as
//! possible to the sink, then into boundary nodes admitted in increasing
//! distance-label stages. Arcs from a boundary node into the block carry no
//! capacity, so flow leaves a block but never enters through the boundary.
//! Between sweeps, flow that crossed a boundary is credited as excess to the
//! neighbor block at a single-threaded barrier, and boundary labels are
//! raised for credits that could not move. The run ends with a sweep that
//! crosses no boundary and changes no label.
//!
//! Blocks work on private subgraph copies rebuilt from the shared residual
//! state each sweep, so workers never race on graph cells.

use std::sync::Mutex;

use super::{boundary_set, BlockPartition};
use crate::bk::BkSolver;
use crate::graph::{ArcId, CutResult, Graph, GraphBuilder, NodeId, Side};
use crate::Flow;

/// Sweep accounting; the sweep count obeys `2 n_B^2 + 1` where `n_B` is the
/// total number of boundary nodes.
#[derive(Debug, Clone, Copy)]
pub struct ArdStats {
    pub sweeps: usize,
    pub boundary_nodes: usize,
}

struct BlockOutcome<F> {
    /// final residuals of in-block pairs: (global fwd arc, fwd, rev)
    internal: Vec<(ArcId, F, F)>,
    /// net flow pushed into the boundary per global arc
    crossings: Vec<(ArcId, F)>,
    /// (node, new residual terminal, new credit)
    terminals: Vec<(NodeId, F, F)>,
    /// label raises for stuck credits
    relabels: Vec<(NodeId, u32)>,
}

/// One block's discharge against a snapshot of the shared residual state.
#[allow(clippy::too_many_arguments)]
fn discharge_block<F: Flow>(
    g: &Graph<F>,
    interior: &[NodeId],
    boundary: &[NodeId],
    credit: &[F],
    label: &[u32],
    label_cap: u32,
) -> BlockOutcome<F> {
    let nl = interior.len() + boundary.len();
    let mut local_of = vec![u32::MAX; g.node_count()];
    for (l, v) in interior.iter().chain(boundary).enumerate() {
        local_of[v.0 as usize] = l as u32;
    }
    let is_interior = |v: NodeId| (local_of[v.0 as usize] as usize) < interior.len();

    let mut b = GraphBuilder::<F>::new(nl, nl).unwrap();
    let mut internal_map: Vec<(u32, ArcId)> = Vec::new(); // local pair start -> global fwd
    let mut boundary_map: Vec<(u32, ArcId, F)> = Vec::new(); // local pair start, global, built cap
    let mut pairs = 0u32;
    for &v in interior {
        for a in g.out_arcs(v) {
            let w = g.head_of(a);
            if local_of[w.0 as usize] == u32::MAX {
                continue;
            }
            if is_interior(w) {
                if a < g.rev(a) {
                    b.add_edge(
                        NodeId(local_of[v.0 as usize]),
                        NodeId(local_of[w.0 as usize]),
                        g.residual(a),
                        g.residual(g.rev(a)),
                        false,
                    )
                    .unwrap();
                    internal_map.push((2 * pairs, a));
                    pairs += 1;
                }
            } else {
                // boundary target: flow may leave the block, never enter
                let cap = g.residual(a);
                b.add_edge(
                    NodeId(local_of[v.0 as usize]),
                    NodeId(local_of[w.0 as usize]),
                    cap,
                    F::zero(),
                    false,
                )
                .unwrap();
                boundary_map.push((2 * pairs, a, cap));
                pairs += 1;
            }
        }
    }
    for (l, &v) in interior.iter().enumerate() {
        let tr = g.tr_cap(v) + credit[v.0 as usize];
        b.add_terminal(NodeId(l as u32), tr.max(F::zero()), (-tr).max(F::zero()))
            .unwrap();
    }
    let mut local = b.build(false);

    // stage 0: sink only, every source may push
    let all_locals: Vec<NodeId> = (0..nl as u32).map(NodeId).collect();
    let run_stage = |local: &Graph<F>, stage: u32| {
        let mut solver = BkSolver::new(nl);
        solver.init_source_roots(
            local,
            interior.iter().enumerate().filter_map(|(l, &v)| {
                let pure = credit[v.0 as usize].is_zero();
                if pure || label[v.0 as usize] >= stage {
                    Some(NodeId(l as u32))
                } else {
                    None
                }
            }),
        );
        solver.init_sink_roots(local, all_locals.iter().copied());
        solver.solve(local);
    };
    run_stage(&local, 0);

    // admit boundary sinks in increasing label stages; nodes lifted to the
    // cap can no longer lead to the sink and are not admitted at all
    let big = F::huge();
    let mut stages: Vec<u32> = boundary
        .iter()
        .map(|w| label[w.0 as usize])
        .filter(|&l| l < label_cap)
        .collect();
    stages.sort_unstable();
    stages.dedup();
    for dv in stages {
        for (l, &w) in boundary.iter().enumerate() {
            if label[w.0 as usize] == dv {
                local.increase_terminal(NodeId((interior.len() + l) as u32), F::zero(), big);
            }
        }
        run_stage(&local, dv + 1);
    }

    // collect outcomes
    let internal = internal_map
        .iter()
        .map(|&(la, ga)| {
            (
                ga,
                local.residual(ArcId(la)),
                local.residual(local.rev(ArcId(la))),
            )
        })
        .collect();
    let crossings = boundary_map
        .iter()
        .filter_map(|&(la, ga, cap)| {
            let delta = cap - local.residual(ArcId(la));
            debug_assert!(delta >= F::zero());
            (delta > F::zero()).then_some((ga, delta))
        })
        .collect();
    let mut terminals = Vec::with_capacity(interior.len());
    let mut relabels = Vec::new();
    for (l, &v) in interior.iter().enumerate() {
        let final_tr = local.tr_cap(NodeId(l as u32));
        let c0 = credit[v.0 as usize];
        let (tr_new, credit_new) = if final_tr <= F::zero() {
            (final_tr, F::zero())
        } else {
            let c = final_tr.min(c0);
            (final_tr - c, c)
        };
        terminals.push((v, tr_new, credit_new));
        if credit_new > F::zero() {
            // stuck credit: lift it above the boundary nodes it can reach
            let mut reach_min: Option<u32> = None;
            let mut seen = vec![false; nl];
            let mut stack = vec![l as u32];
            seen[l] = true;
            while let Some(x) = stack.pop() {
                for a in local.out_arcs(NodeId(x)) {
                    let y = local.head_of(a).0 as usize;
                    if local.residual(a) > F::zero() && !seen[y] {
                        seen[y] = true;
                        if y >= interior.len() {
                            let w = boundary[y - interior.len()];
                            let lw = label[w.0 as usize];
                            reach_min = Some(reach_min.map_or(lw, |m| m.min(lw)));
                        } else {
                            stack.push(y as u32);
                        }
                    }
                }
            }
            let proposal = reach_min.map_or(label_cap, |m| (m + 1).min(label_cap));
            if proposal > label[v.0 as usize] {
                relabels.push((v, proposal));
            }
        }
    }

    BlockOutcome {
        internal,
        crossings,
        terminals,
        relabels,
    }
}

/// [`ard_solve`] plus sweep accounting.
pub fn ard_solve_with_stats<F: Flow>(
    g: &Graph<F>,
    p: &BlockPartition,
    threads: usize,
) -> (CutResult<F>, ArdStats) {
    p.check_matches(g).expect("partition must cover the graph");
    let threads = threads.max(1);
    let n = g.node_count();
    let k = p.block_count();
    let blocks = p.block_nodes();
    let boundaries: Vec<Vec<NodeId>> = (0..k)
        .map(|b| boundary_set(g, p, b as u32))
        .collect();
    let mut is_boundary = vec![false; n];
    for bs in &boundaries {
        for w in bs {
            is_boundary[w.0 as usize] = true;
        }
    }
    let n_boundary = is_boundary.iter().filter(|x| **x).count();
    let label_cap = n_boundary as u32 + 1;

    let mut credit = vec![F::zero(); n];
    let mut label = vec![0u32; n];
    let mut sweeps = 0usize;

    loop {
        sweeps += 1;
        let outcomes: Vec<Mutex<Option<BlockOutcome<F>>>> =
            (0..k).map(|_| Mutex::new(None)).collect();
        let work: Mutex<Vec<usize>> = Mutex::new((0..k).collect());
        let (credit_ref, label_ref) = (&credit, &label);
        std::thread::scope(|s| {
            for _ in 0..threads.min(k) {
                s.spawn(|| loop {
                    let Some(bidx) = work.lock().unwrap().pop() else {
                        return;
                    };
                    let out = discharge_block(
                        g,
                        &blocks[bidx],
                        &boundaries[bidx],
                        credit_ref,
                        label_ref,
                        label_cap,
                    );
                    *outcomes[bidx].lock().unwrap() = Some(out);
                });
            }
        });

        // single-threaded synchronization barrier
        let mut crossed = false;
        let mut label_changed = false;
        let outcomes: Vec<BlockOutcome<F>> = outcomes
            .into_iter()
            .map(|m| m.into_inner().unwrap().unwrap())
            .collect();
        for out in &outcomes {
            for &(v, tr_new, credit_new) in &out.terminals {
                g.set_tr_cap(v, tr_new);
                credit[v.0 as usize] = credit_new;
            }
            for &(a, fwd, rev) in &out.internal {
                g.set_residual(a, fwd);
                g.set_residual(g.rev(a), rev);
            }
        }
        for out in &outcomes {
            for &(a, delta) in &out.crossings {
                crossed = true;
                g.set_residual(a, g.residual(a) - delta);
                g.set_residual(g.rev(a), g.residual(g.rev(a)) + delta);
                credit[g.head_of(a).0 as usize] += delta;
            }
            for &(v, new_label) in &out.relabels {
                if new_label > label[v.0 as usize] {
                    label[v.0 as usize] = new_label;
                    label_changed = true;
                }
            }
        }
        // gap heuristic: an empty boundary level below the cap strands every
        // label above it, so lift those straight to the cap
        if label_changed {
            let mut occupied = vec![false; label_cap as usize + 1];
            for (v, flag) in is_boundary.iter().enumerate() {
                if *flag && label[v] < label_cap {
                    occupied[label[v] as usize] = true;
                }
            }
            if let Some(gap) = occupied[..label_cap as usize]
                .iter()
                .position(|o| !o)
                .map(|g| g as u32)
            {
                for (v, flag) in is_boundary.iter().enumerate() {
                    if *flag && label[v] > gap && label[v] < label_cap {
                        label[v] = label_cap;
                    }
                }
            }
        }
        if !crossed && !label_changed {
            break;
        }
    }

    // source side: whatever cannot reach the sink in the final residual
    let mut reach_t = vec![false; n];
    let mut bfs: std::collections::VecDeque<u32> = (0..n as u32)
        .filter(|&v| g.tr_cap(NodeId(v)) < F::zero())
        .collect();
    for &v in &bfs {
        reach_t[v as usize] = true;
    }
    while let Some(v) = bfs.pop_front() {
        for a in g.out_arcs(NodeId(v)) {
            let q = g.head_of(a).0 as usize;
            if !reach_t[q] && g.residual(g.rev(a)) > F::zero() {
                reach_t[q] = true;
                bfs.push_back(q as u32);
            }
        }
    }
    debug_assert!(
        (0..n).all(|v| !reach_t[v]
            || (credit[v] <= F::zero() && g.tr_cap(NodeId(v as u32)) <= F::zero())),
        "excess still reaches the sink: discharge did not terminate"
    );
    let side: Vec<Side> = reach_t
        .iter()
        .map(|r| if *r { Side::Sink } else { Side::Source })
        .collect();
    let flow_value = g.cut_capacity(&side);
    (
        CutResult { flow_value, side },
        ArdStats {
            sweeps,
            boundary_nodes: n_boundary,
        },
    )
}

/// Minimum cut by parallel region discharge; the value equals a serial
/// solve exactly.
pub fn ard_solve<F: Flow>(g: &Graph<F>, p: &BlockPartition, threads: usize) -> CutResult<F> {
    ard_solve_with_stats(g, p, threads).0
}
