//! Dual decomposition over overlapping blocks.
//!
//! The graph is split into block subproblems with duplicated seam nodes; all
//! capacities are doubled so the even splits stay integral. Each iteration
//! solves every block independently, then compares the sides of each
//! duplicated node. Full agreement certifies a globally optimal cut;
//! otherwise the duplicates' terminal capacities move by a diminishing step
//! (supergradient ascent on the dual) and the blocks are solved again.
//! Convergence is not guaranteed; a run that exhausts `max_iters` reports
//! back instead of failing.

use std::sync::Mutex;

use super::{balanced_share, OverlapPartition};
use crate::bk::bk_solve;
use crate::graph::{CutResult, Graph, GraphBuilder, NodeId, Side};
use crate::Flow;

/// Iteration report for a converged run.
#[derive(Debug, Clone, Copy)]
pub struct DdStats {
    pub iterations: usize,
}

/// The duplicates never agreed within the iteration budget.
#[derive(Debug, Clone, Copy, thiserror::Error)]
#[error("dual decomposition did not converge within {iterations} iterations")]
pub struct NonConvergence {
    pub iterations: usize,
}

struct Block<F> {
    graph: Graph<F>,
    /// global id of each local node
    globals: Vec<NodeId>,
    /// doubled terminal share per local node
    base_tr: Vec<F>,
}

/// Builds the per-block subgraphs with doubled, evenly split capacities.
fn build_blocks<F: Flow>(g: &Graph<F>, op: &OverlapPartition) -> Vec<Block<F>> {
    let two = F::one() + F::one();
    // capacities are bounded by the builder, so doubling into a fresh
    // problem stays in range unless the original already hit the bound
    let dbl = |c: F| c.checked_mul(&two).unwrap_or(c);

    let mut local_of = vec![u32::MAX; g.node_count()];
    let mut blocks = Vec::with_capacity(op.blocks.len());
    for (b, nodes) in op.blocks.iter().enumerate() {
        for (l, v) in nodes.iter().enumerate() {
            local_of[v.0 as usize] = l as u32;
        }
        let mut builder = GraphBuilder::<F>::new(nodes.len().max(1), nodes.len()).unwrap();
        let mut base_tr = vec![F::zero(); nodes.len()];
        for (l, v) in nodes.iter().enumerate() {
            let d = op.containing[v.0 as usize].len();
            let idx = op.containing[v.0 as usize]
                .iter()
                .position(|&x| x == b as u32)
                .unwrap();
            base_tr[l] = balanced_share(dbl(g.orig_tr(*v)), d, idx);
        }
        for v in nodes {
            for a in g.out_arcs(*v) {
                if a >= g.rev(a) {
                    continue; // one visit per pair
                }
                let w = g.head_of(a);
                let (lv, lw) = (local_of[v.0 as usize], local_of[w.0 as usize]);
                if lw == u32::MAX || !op.blocks[b].binary_search(&w).is_ok() {
                    continue;
                }
                // split the pair among every block containing both endpoints
                let both: Vec<u32> = op.containing[v.0 as usize]
                    .iter()
                    .filter(|x| op.containing[w.0 as usize].contains(x))
                    .copied()
                    .collect();
                let pos = both.iter().position(|&x| x == b as u32);
                let Some(pos) = pos else { continue };
                let cf = balanced_share(dbl(g.orig_cap(a)), both.len(), pos);
                let cr = balanced_share(dbl(g.orig_cap(g.rev(a))), both.len(), pos);
                builder
                    .add_edge(NodeId(lv), NodeId(lw), cf, cr, false)
                    .unwrap();
            }
        }
        blocks.push(Block {
            graph: builder.build(false),
            globals: nodes.clone(),
            base_tr,
        });
        for v in nodes {
            local_of[v.0 as usize] = u32::MAX;
        }
    }
    blocks
}

/// Minimum cut by dual decomposition; `Ok` carries the cut and the number of
/// iterations it took, `Err` reports non-convergence. `step0` defaults to
/// the largest doubled terminal capacity.
pub fn dd_solve<F: Flow>(
    g: &Graph<F>,
    op: &OverlapPartition,
    threads: usize,
    max_iters: usize,
    step0: Option<F>,
) -> Result<(CutResult<F>, DdStats), NonConvergence> {
    assert!(max_iters >= 1);
    let threads = threads.max(1);
    let n = g.node_count();
    let k = op.blocks.len();
    let blocks: Vec<Mutex<Block<F>>> = build_blocks(g, op).into_iter().map(Mutex::new).collect();

    let two = F::one() + F::one();
    let step0 = step0.unwrap_or_else(|| {
        g.nodes()
            .map(|v| (g.orig_tr(v).abs()).checked_mul(&two).unwrap_or(g.orig_tr(v).abs()))
            .fold(F::one(), |a, b| a.max(b))
    });

    // dual adjustment per (block, local node); only duplicates ever move
    let mut lambda: Vec<Vec<F>> = op.blocks.iter().map(|ns| vec![F::zero(); ns.len()]).collect();
    let mut local_side: Vec<Vec<Side>> = op
        .blocks
        .iter()
        .map(|ns| vec![Side::Sink; ns.len()])
        .collect();

    for iter in 1..=max_iters {
        // parallel independent block solves between barriers
        let work: Mutex<Vec<usize>> = Mutex::new((0..k).collect());
        let sides: Vec<Mutex<Option<Vec<Side>>>> = (0..k).map(|_| Mutex::new(None)).collect();
        let lambda_ref = &lambda;
        std::thread::scope(|s| {
            for _ in 0..threads.min(k) {
                s.spawn(|| loop {
                    let Some(b) = work.lock().unwrap().pop() else {
                        return;
                    };
                    let mut block = blocks[b].lock().unwrap();
                    block.graph.reset_residuals();
                    for l in 0..block.globals.len() {
                        let tr = block.base_tr[l] + lambda_ref[b][l];
                        block.graph.set_tr_cap(NodeId(l as u32), tr);
                    }
                    let cut = bk_solve(&block.graph);
                    let mut out: Vec<Side> = Vec::with_capacity(block.globals.len());
                    out.extend((0..block.globals.len()).map(|l| cut.side[l]));
                    *sides[b].lock().unwrap() = Some(out);
                });
            }
        });
        for (b, s) in sides.into_iter().enumerate() {
            local_side[b] = s.into_inner().unwrap().unwrap();
        }

        // agreement check and dual update, single-threaded at the barrier
        let mut all_agree = true;
        let t = F::from(iter).unwrap();
        let tau = (step0 / t).max(F::one());
        for v in op.duplicated_nodes() {
            let owners = &op.containing[v.0 as usize];
            let dup_sides: Vec<Side> = owners
                .iter()
                .map(|&b| {
                    let l = op.blocks[b as usize].binary_search(&v).unwrap();
                    local_side[b as usize][l]
                })
                .collect();
            if dup_sides.iter().all(|s| *s == dup_sides[0]) {
                continue;
            }
            all_agree = false;
            // push source-sided duplicates down and sink-sided ones up,
            // preserving the total terminal share exactly
            let mut deltas: Vec<F> = dup_sides
                .iter()
                .map(|s| if *s == Side::Source { -tau } else { tau })
                .collect();
            let imbalance: F = deltas.iter().copied().fold(F::zero(), |a, b| a + b);
            for (i, d) in deltas.iter_mut().enumerate() {
                *d -= balanced_share(imbalance, owners.len(), i);
            }
            for (&b, d) in owners.iter().zip(&deltas) {
                let l = op.blocks[b as usize].binary_search(&v).unwrap();
                lambda[b as usize][l] += *d;
            }
        }

        if all_agree {
            let mut side = vec![Side::Sink; n];
            for (b, nodes) in op.blocks.iter().enumerate() {
                for (l, v) in nodes.iter().enumerate() {
                    side[v.0 as usize] = local_side[b][l];
                }
            }
            let flow_value = g.cut_capacity(&side);
            return Ok((CutResult { flow_value, side }, DdStats { iterations: iter }));
        }
    }
    Err(NonConvergence {
        iterations: max_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bk::bk_solve;
    use crate::graph::GraphBuilder;
    use crate::parallel::{make_overlapping, BlockPartition};
    use crate::Cap;

    #[test]
    fn no_duplicates_converges_in_one_iteration() {
        let mut b = GraphBuilder::<Cap>::new(2, 0).unwrap();
        b.add_terminal(NodeId(0), 5, 3).unwrap();
        b.add_terminal(NodeId(1), 1, 4).unwrap();
        let g = b.build(false);
        let p = BlockPartition::from_block_ids(vec![0, 1]).unwrap();
        let op = make_overlapping(&g, &p);
        let (cut, stats) = dd_solve(&g, &op, 2, 10, None).unwrap();
        assert_eq!(stats.iterations, 1);
        assert_eq!(cut.flow_value, 3 + 1);
    }

    #[test]
    fn seam_disagreement_resolves_on_a_chain() {
        // 3-node chain where the middle node is duplicated; the asymmetric
        // initial split forces at least one disagreeing round
        let mut b = GraphBuilder::<Cap>::new(3, 2).unwrap();
        b.add_terminal(NodeId(0), 9, 0).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 5, 0, false).unwrap();
        b.add_terminal(NodeId(1), 3, 0).unwrap();
        b.add_edge(NodeId(1), NodeId(2), 4, 0, false).unwrap();
        b.add_terminal(NodeId(2), 0, 6).unwrap();
        let g = b.build(false);
        let serial = {
            let mut fresh = g.clone();
            fresh.reset_residuals();
            bk_solve(&fresh).flow_value
        };
        let p = BlockPartition::from_block_ids(vec![0, 0, 1]).unwrap();
        let op = make_overlapping(&g, &p);
        let (cut, stats) = dd_solve(&g, &op, 2, 100, None).unwrap();
        assert_eq!(cut.flow_value, serial);
        assert!(stats.iterations <= 100);
    }
}
