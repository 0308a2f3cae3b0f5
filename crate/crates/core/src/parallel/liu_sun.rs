//! Adaptive bottom-up merging.
//!
//! Phase one severs every inter-block arc (capacities set to zero, originals
//! remembered per block pair) and solves the blocks in parallel. Phase two
//! repeatedly picks an unmerged pair of blocks, restores its arcs, and
//! re-solves the union dynamically, preferring pairs with the most potential
//! for new augmenting paths. A global lock guards the pair scan; per-block
//! busy flags keep workers off each other's blocks.

use std::collections::HashMap;
use std::sync::{Condvar, Mutex};

use super::BlockPartition;
use crate::bk::BkSolver;
use crate::graph::{ArcId, CutResult, Graph, NodeId, Side};
use crate::Flow;

/// Severed/restored capacity bookkeeping of one run.
#[derive(Debug, Clone)]
pub struct LiuSunStats<F> {
    pub severed_pairs: usize,
    pub severed_total: F,
    pub restored_total: F,
    pub merges: usize,
}

struct MergePair<F> {
    id: usize,
    blocks: (u32, u32),
    /// forward half-arc plus the stored original capacities of both halves
    arcs: Vec<(ArcId, F, F)>,
}

struct Phase2<F: Flow> {
    queue: Vec<MergePair<F>>,
    uf: Vec<u32>,
    busy: Vec<bool>,
    solvers: HashMap<u32, BkSolver<F>>,
    nodes: HashMap<u32, Vec<NodeId>>,
    restored_total: F,
    merges: usize,
}

fn find(uf: &mut [u32], mut x: u32) -> u32 {
    while uf[x as usize] != x {
        uf[x as usize] = uf[uf[x as usize] as usize];
        x = uf[x as usize];
    }
    x
}

impl<F: Flow> Phase2<F> {
    /// Picks the best available pair: most severed arcs running from the
    /// source side of the tail's cut to the sink side of the head's cut,
    /// then larger severed capacity, then lower pair id.
    fn pick<'g>(&mut self, g: &'g Graph<F>, p: &BlockPartition) -> Option<usize> {
        let mut best: Option<(usize, (u64, F, std::cmp::Reverse<usize>))> = None;
        for (idx, pair) in self.queue.iter().enumerate() {
            let ra = find(&mut self.uf, pair.blocks.0);
            let rb = find(&mut self.uf, pair.blocks.1);
            if self.busy[ra as usize] || self.busy[rb as usize] {
                continue;
            }
            let mut score = 0u64;
            let mut total = F::zero();
            for &(a, cf, cr) in &pair.arcs {
                total += cf + cr;
                let u = g.tail_of(a);
                let v = g.head_of(a);
                let su = self.solvers[&find(&mut self.uf, p.block_of(u))].side(u);
                let sv = self.solvers[&find(&mut self.uf, p.block_of(v))].side(v);
                if su == Side::Source && sv == Side::Sink {
                    score += 1;
                }
                if cr > F::zero() && sv == Side::Source && su == Side::Sink {
                    score += 1;
                }
            }
            let key = (score, total, std::cmp::Reverse(pair.id));
            if best.as_ref().map_or(true, |(_, k)| key > *k) {
                best = Some((idx, key));
            }
        }
        best.map(|(idx, _)| idx)
    }
}

/// [`liu_sun_solve`] plus severed/restored bookkeeping.
pub fn liu_sun_solve_with_stats<F: Flow>(
    g: &Graph<F>,
    p: &BlockPartition,
    threads: usize,
) -> (CutResult<F>, LiuSunStats<F>) {
    p.check_matches(g).expect("partition must cover the graph");
    let threads = threads.max(1);
    let n = g.node_count();
    let block_nodes = p.block_nodes();
    let k = p.block_count();

    // phase one: sever inter-block arcs, remembering original capacities
    let mut by_pair: HashMap<(u32, u32), Vec<(ArcId, F, F)>> = HashMap::new();
    let mut severed_total = F::zero();
    for u in g.nodes() {
        for a in g.out_arcs(u) {
            if a < g.rev(a) {
                let v = g.head_of(a);
                let (bu, bv) = (p.block_of(u), p.block_of(v));
                if bu != bv {
                    let (cf, cr) = (g.residual(a), g.residual(g.rev(a)));
                    severed_total += cf + cr;
                    g.set_residual(a, F::zero());
                    g.set_residual(g.rev(a), F::zero());
                    let key = (bu.min(bv), bu.max(bv));
                    by_pair.entry(key).or_default().push((a, cf, cr));
                }
            }
        }
    }
    let queue: Vec<MergePair<F>> = by_pair
        .into_iter()
        .collect::<std::collections::BTreeMap<_, _>>()
        .into_iter()
        .enumerate()
        .map(|(id, (blocks, arcs))| MergePair { id, blocks, arcs })
        .collect();
    let severed_pairs = queue.len();

    // solve each block in parallel
    let solver_slots: Vec<Mutex<Option<BkSolver<F>>>> =
        (0..k).map(|_| Mutex::new(None)).collect();
    let work: Mutex<Vec<usize>> = Mutex::new((0..k).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.min(k) {
            s.spawn(|| loop {
                let Some(b) = work.lock().unwrap().pop() else {
                    return;
                };
                let mut solver = BkSolver::new(n);
                solver.init_nodes(g, &block_nodes[b]);
                solver.solve(g);
                *solver_slots[b].lock().unwrap() = Some(solver);
            });
        }
    });

    // phase two: merge pairs until none are left
    let state = Mutex::new(Phase2 {
        queue,
        uf: (0..k as u32).collect(),
        busy: vec![false; k],
        solvers: solver_slots
            .into_iter()
            .enumerate()
            .map(|(b, s)| (b as u32, s.into_inner().unwrap().unwrap()))
            .collect(),
        nodes: block_nodes
            .iter()
            .enumerate()
            .map(|(b, ns)| (b as u32, ns.clone()))
            .collect(),
        restored_total: F::zero(),
        merges: 0,
    });
    let ready = Condvar::new();

    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let mut st = state.lock().unwrap();
                let idx = loop {
                    if st.queue.is_empty() {
                        return;
                    }
                    if let Some(idx) = st.pick(g, p) {
                        break idx;
                    }
                    st = ready.wait(st).unwrap();
                };
                let pair = st.queue.swap_remove(idx);
                let ra = find(&mut st.uf, pair.blocks.0);
                let rb = find(&mut st.uf, pair.blocks.1);
                st.busy[ra as usize] = true;
                st.busy[rb as usize] = true;
                let mut solver = st.solvers.remove(&ra).unwrap();
                let mut nodes_a = st.nodes.remove(&ra).unwrap();
                let other = if ra != rb {
                    Some((
                        st.solvers.remove(&rb).unwrap(),
                        st.nodes.remove(&rb).unwrap(),
                    ))
                } else {
                    None
                };
                drop(st);

                // restore the severed arcs and re-solve the merged block
                let mut restored = F::zero();
                for &(a, cf, cr) in &pair.arcs {
                    g.set_residual(a, g.residual(a) + cf);
                    g.set_residual(g.rev(a), g.residual(g.rev(a)) + cr);
                    restored += cf + cr;
                }
                if let Some((other_solver, other_nodes)) = other {
                    solver.absorb(&other_solver, &other_nodes);
                    nodes_a.extend(other_nodes);
                }
                for &(a, _, _) in &pair.arcs {
                    solver.mark_node(g.tail_of(a));
                    solver.mark_node(g.head_of(a));
                }
                solver.resolve(g);

                let mut st = state.lock().unwrap();
                st.uf[rb as usize] = ra;
                st.solvers.insert(ra, solver);
                st.nodes.insert(ra, nodes_a);
                st.busy[ra as usize] = false;
                st.busy[rb as usize] = false;
                st.restored_total += restored;
                st.merges += 1;
                drop(st);
                ready.notify_all();
            });
        }
    });

    let st = state.into_inner().unwrap();
    let mut flow = F::zero();
    let mut side = vec![Side::Sink; n];
    for (root, solver) in &st.solvers {
        flow += solver.pushed_flow();
        for &i in &st.nodes[root] {
            side[i.0 as usize] = solver.side(i);
        }
    }
    let cut = CutResult {
        flow_value: flow + g.flow_constant(),
        side,
    };
    let stats = LiuSunStats {
        severed_pairs,
        severed_total,
        restored_total: st.restored_total,
        merges: st.merges,
    };
    (cut, stats)
}

/// Maximum flow by block decomposition and bottom-up merging. The value
/// equals a serial solve exactly, independent of thread count and merge
/// interleaving.
pub fn liu_sun_solve<F: Flow>(
    g: &Graph<F>,
    p: &BlockPartition,
    threads: usize,
) -> CutResult<F> {
    liu_sun_solve_with_stats(g, p, threads).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bk::bk_solve;
    use crate::graph::GraphBuilder;
    use crate::Cap;

    fn two_block_graph() -> Graph<Cap> {
        // two 2-node chains joined by a cross arc
        let mut b = GraphBuilder::<Cap>::new(4, 4).unwrap();
        b.add_terminal(NodeId(0), 9, 0).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 4, 0, false).unwrap();
        b.add_terminal(NodeId(1), 0, 2).unwrap();
        b.add_terminal(NodeId(2), 6, 0).unwrap();
        b.add_edge(NodeId(2), NodeId(3), 5, 0, false).unwrap();
        b.add_terminal(NodeId(3), 0, 8).unwrap();
        b.add_edge(NodeId(1), NodeId(3), 3, 0, false).unwrap();
        b.build(false)
    }

    #[test]
    fn matches_serial_on_two_blocks() {
        let serial = bk_solve(&two_block_graph()).flow_value;
        let g = two_block_graph();
        let p = BlockPartition::from_block_ids(vec![0, 0, 1, 1]).unwrap();
        for threads in [1, 2, 4] {
            let mut g = g.clone();
            g.reset_residuals();
            let (cut, stats) = liu_sun_solve_with_stats(&g, &p, threads);
            assert_eq!(cut.flow_value, serial);
            assert_eq!(g.cut_capacity(&cut.side), serial);
            assert_eq!(stats.severed_total, stats.restored_total);
        }
    }

    #[test]
    fn decomposable_graph_needs_no_restores() {
        let mut b = GraphBuilder::<Cap>::new(2, 0).unwrap();
        b.add_terminal(NodeId(0), 5, 3).unwrap();
        b.add_terminal(NodeId(1), 2, 6).unwrap();
        let g = b.build(false);
        let p = BlockPartition::from_block_ids(vec![0, 1]).unwrap();
        let (cut, stats) = liu_sun_solve_with_stats(&g, &p, 2);
        assert_eq!(cut.flow_value, 3 + 2);
        assert_eq!(stats.severed_pairs, 0);
        assert_eq!(stats.merges, 0);
    }
}
