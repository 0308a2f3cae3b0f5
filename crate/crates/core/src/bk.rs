//! Boykov-Kolmogorov augmenting-path solver.
//!
//! Grows search trees from both terminals, augments along contact paths, and
//! repairs the trees through orphan adoption with the timestamp/distance
//! shortcut. Supports dynamic re-solves after capacity increases on marked
//! nodes, which is what the block-merging parallel scheme relies on.
//!
//! The solver state is owned separately from the graph; every call takes the
//! graph it operates on, which must be the same one across a solver's life.

use std::collections::VecDeque;

use crate::graph::{ArcId, CutResult, Graph, NodeId, Side};
use crate::Flow;

const PARENT_TERMINAL: u32 = u32::MAX;
const PARENT_ORPHAN: u32 = u32::MAX - 1;
const PARENT_NONE: u32 = u32::MAX - 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tree {
    Free,
    Source,
    Sink,
}

/// Search-tree state for one solver instance.
///
/// A solver owns the residual capacities of the nodes it was seeded with;
/// several instances may run on disjoint blocks of the same graph.
#[derive(Debug, Clone)]
pub struct BkSolver<F> {
    parent: Vec<u32>,
    tree: Vec<Tree>,
    ts: Vec<u32>,
    dist: Vec<u32>,
    active: VecDeque<u32>,
    in_active: Vec<bool>,
    orphans: Vec<u32>,
    marked: Vec<u32>,
    time: u32,
    flow: F,
}

impl<F: Flow> BkSolver<F> {
    pub fn new(node_count: usize) -> Self {
        BkSolver {
            parent: vec![PARENT_NONE; node_count],
            tree: vec![Tree::Free; node_count],
            ts: vec![0; node_count],
            dist: vec![0; node_count],
            active: VecDeque::new(),
            in_active: vec![false; node_count],
            orphans: Vec::new(),
            marked: Vec::new(),
            time: 1,
            flow: F::zero(),
        }
    }

    /// Roots every node with a nonzero terminal capacity. Source roots are
    /// seeded first so tree ties break toward the source tree.
    pub fn init_all(&mut self, g: &Graph<F>) {
        for i in g.nodes() {
            if g.tr_cap(i) > F::zero() {
                self.make_root(i, Tree::Source);
            }
        }
        for i in g.nodes() {
            if g.tr_cap(i) < F::zero() {
                self.make_root(i, Tree::Sink);
            }
        }
    }

    /// Roots the given nodes only; used by block-based parallel schemes.
    pub fn init_nodes(&mut self, g: &Graph<F>, nodes: &[NodeId]) {
        self.init_source_roots(g, nodes.iter().copied());
        self.init_sink_roots(g, nodes.iter().copied());
    }

    /// Roots only the positive-capacity nodes of the given set. Positive
    /// terminal capacity outside the seeded set stays inert.
    pub fn init_source_roots(&mut self, g: &Graph<F>, nodes: impl Iterator<Item = NodeId>) {
        for i in nodes {
            if g.tr_cap(i) > F::zero() {
                self.make_root(i, Tree::Source);
            }
        }
    }

    /// Roots only the negative-capacity nodes of the given set.
    pub fn init_sink_roots(&mut self, g: &Graph<F>, nodes: impl Iterator<Item = NodeId>) {
        for i in nodes {
            if g.tr_cap(i) < F::zero() {
                self.make_root(i, Tree::Sink);
            }
        }
    }

    fn make_root(&mut self, i: NodeId, tree: Tree) {
        let k = i.0 as usize;
        self.tree[k] = tree;
        self.parent[k] = PARENT_TERMINAL;
        self.dist[k] = 1;
        self.ts[k] = 0;
        self.activate(i.0);
    }

    fn activate(&mut self, i: u32) {
        if !self.in_active[i as usize] {
            self.in_active[i as usize] = true;
            self.active.push_back(i);
        }
    }

    /// Flow pushed by this instance, excluding the graph's flow constant.
    pub fn pushed_flow(&self) -> F {
        self.flow
    }

    pub fn side(&self, i: NodeId) -> Side {
        match self.tree[i.0 as usize] {
            Tree::Source => Side::Source,
            _ => Side::Sink, // free nodes are assigned to the sink side
        }
    }

    pub fn sides(&self) -> Vec<Side> {
        (0..self.tree.len())
            .map(|i| self.side(NodeId(i as u32)))
            .collect()
    }

    pub fn cut(&self, g: &Graph<F>) -> CutResult<F> {
        CutResult {
            flow_value: self.flow + g.flow_constant(),
            side: self.sides(),
        }
    }

    /// Bytes held by this solver's per-node state.
    pub fn state_bytes(&self) -> usize {
        self.parent.len() * (4 + 1 + 4 + 4 + 1)
    }

    /// Grows trees and augments until no active node remains.
    pub fn solve(&mut self, g: &Graph<F>) {
        debug_assert_eq!(self.parent.len(), g.node_count());
        while let Some(p) = self.active.pop_front() {
            self.in_active[p as usize] = false;
            match self.tree[p as usize] {
                Tree::Free => continue,
                Tree::Source => self.grow_source(g, p),
                Tree::Sink => self.grow_sink(g, p),
            }
        }
    }

    fn grow_source(&mut self, g: &Graph<F>, p: u32) {
        for a in g.out_arcs(NodeId(p)) {
            if self.tree[p as usize] != Tree::Source {
                return; // lost tree membership mid-scan
            }
            if g.residual(a) <= F::zero() {
                continue;
            }
            let q = g.head_of(a).0;
            match self.tree[q as usize] {
                Tree::Free => {
                    self.tree[q as usize] = Tree::Source;
                    self.parent[q as usize] = a.0; // arc p -> q
                    self.dist[q as usize] = self.dist[p as usize] + 1;
                    self.ts[q as usize] = self.ts[p as usize];
                    self.activate(q);
                }
                Tree::Sink => {
                    self.time += 1;
                    self.augment(g, a);
                    self.adopt_orphans(g);
                    self.activate(p);
                    return;
                }
                Tree::Source => {}
            }
        }
    }

    fn grow_sink(&mut self, g: &Graph<F>, p: u32) {
        for a in g.out_arcs(NodeId(p)) {
            if self.tree[p as usize] != Tree::Sink {
                return;
            }
            let ra = g.rev(a); // arc q -> p
            if g.residual(ra) <= F::zero() {
                continue;
            }
            let q = g.head_of(a).0;
            match self.tree[q as usize] {
                Tree::Free => {
                    // q's parent is p via the arc (q -> p)
                    self.tree[q as usize] = Tree::Sink;
                    self.parent[q as usize] = ra.0;
                    self.dist[q as usize] = self.dist[p as usize] + 1;
                    self.ts[q as usize] = self.ts[p as usize];
                    self.activate(q);
                }
                Tree::Source => {
                    self.time += 1;
                    self.augment(g, ra);
                    self.adopt_orphans(g);
                    self.activate(p);
                    return;
                }
                Tree::Sink => {}
            }
        }
    }

    /// Pushes the bottleneck amount along the path through `contact`, whose
    /// tail is in the source tree and head in the sink tree.
    fn augment(&mut self, g: &Graph<F>, contact: ArcId) {
        let u = g.tail_of(contact).0;
        let v = g.head_of(contact).0;

        // bottleneck = minimum residual capacity along the path
        let mut delta = g.residual(contact);
        let mut x = u;
        while self.parent[x as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[x as usize]); // arc parent -> x
            delta = delta.min(g.residual(pa));
            x = g.tail_of(pa).0;
        }
        delta = delta.min(g.tr_cap(NodeId(x)));
        let mut y = v;
        while self.parent[y as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[y as usize]); // arc y -> parent
            delta = delta.min(g.residual(pa));
            y = g.head_of(pa).0;
        }
        delta = delta.min(-g.tr_cap(NodeId(y)));
        debug_assert!(delta > F::zero());

        // push and collect orphans at saturated arcs
        g.push_on(contact, delta);
        let mut x = u;
        while self.parent[x as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[x as usize]);
            g.push_on(pa, delta);
            let next = g.tail_of(pa).0;
            if g.residual(pa) == F::zero() {
                self.make_orphan(x);
            }
            x = next;
        }
        g.set_tr_cap(NodeId(x), g.tr_cap(NodeId(x)) - delta);
        if g.tr_cap(NodeId(x)) == F::zero() {
            self.make_orphan(x);
        }
        let mut y = v;
        while self.parent[y as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[y as usize]);
            g.push_on(pa, delta);
            let next = g.head_of(pa).0;
            if g.residual(pa) == F::zero() {
                self.make_orphan(y);
            }
            y = next;
        }
        g.set_tr_cap(NodeId(y), g.tr_cap(NodeId(y)) + delta);
        if g.tr_cap(NodeId(y)) == F::zero() {
            self.make_orphan(y);
        }

        self.flow += delta;
    }

    fn make_orphan(&mut self, i: u32) {
        self.parent[i as usize] = PARENT_ORPHAN;
        self.orphans.push(i);
    }

    /// Processes orphans LIFO, re-attaching each to its tree through a valid
    /// neighbor or freeing it.
    fn adopt_orphans(&mut self, g: &Graph<F>) {
        while let Some(o) = self.orphans.pop() {
            if self.parent[o as usize] != PARENT_ORPHAN {
                continue;
            }
            match self.tree[o as usize] {
                Tree::Source => self.adopt(g, o, Tree::Source),
                Tree::Sink => self.adopt(g, o, Tree::Sink),
                Tree::Free => {}
            }
        }
    }

    /// Distance from `q` to its terminal root, or `None` when `q`'s chain is
    /// broken. Stamps the walked chain on success.
    fn origin_distance(&mut self, g: &Graph<F>, q: u32) -> Option<u32> {
        let mut d = 0u32;
        let mut x = q;
        loop {
            if self.ts[x as usize] == self.time {
                d += self.dist[x as usize];
                break;
            }
            let pa = self.parent[x as usize];
            d += 1;
            if pa == PARENT_TERMINAL {
                self.ts[x as usize] = self.time;
                self.dist[x as usize] = 1;
                break;
            }
            if pa == PARENT_ORPHAN || pa == PARENT_NONE {
                return None;
            }
            x = match self.tree[x as usize] {
                Tree::Source => g.tail_of(ArcId(pa)).0,
                _ => g.head_of(ArcId(pa)).0,
            };
        }
        // mark the path so later walks this round shortcut here
        let mut dd = d;
        let mut x = q;
        while self.ts[x as usize] != self.time {
            self.ts[x as usize] = self.time;
            self.dist[x as usize] = dd;
            dd -= 1;
            let pa = ArcId(self.parent[x as usize]);
            x = match self.tree[x as usize] {
                Tree::Source => g.tail_of(pa).0,
                _ => g.head_of(pa).0,
            };
        }
        Some(d)
    }

    fn adopt(&mut self, g: &Graph<F>, o: u32, tr: Tree) {
        let mut best_arc = PARENT_NONE;
        let mut best_d = u32::MAX;
        for a in g.out_arcs(NodeId(o)) {
            let q = g.head_of(a).0;
            if self.tree[q as usize] != tr {
                continue;
            }
            let feeding = match tr {
                Tree::Source => g.rev(a), // parent q feeds o via q -> o
                _ => a,                   // o feeds parent q via o -> q
            };
            if g.residual(feeding) <= F::zero() {
                continue;
            }
            if let Some(d) = self.origin_distance(g, q) {
                if d < best_d {
                    best_d = d;
                    best_arc = match tr {
                        Tree::Source => g.rev(a).0, // arc q -> o
                        _ => a.0,                   // arc o -> q
                    };
                }
            }
        }
        if best_arc != PARENT_NONE {
            self.parent[o as usize] = best_arc;
            self.ts[o as usize] = self.time;
            self.dist[o as usize] = best_d + 1;
            return;
        }

        // no parent found: o leaves the tree, neighbors get another chance
        for a in g.out_arcs(NodeId(o)) {
            let q = g.head_of(a).0;
            if self.tree[q as usize] != tr {
                continue;
            }
            let feeding = match tr {
                Tree::Source => g.rev(a),
                _ => a,
            };
            if g.residual(feeding) > F::zero() {
                self.activate(q);
            }
            let pa = self.parent[q as usize];
            if pa != PARENT_TERMINAL && pa != PARENT_ORPHAN && pa != PARENT_NONE {
                let is_child = match tr {
                    // source tree stores (parent -> child)
                    Tree::Source => pa == a.0,
                    // sink tree stores (child -> parent), so q -> o
                    _ => pa == g.rev(a).0,
                };
                if is_child {
                    self.make_orphan(q);
                }
            }
        }
        self.tree[o as usize] = Tree::Free;
    }

    /// Re-enters node `i` into the active set so a following
    /// [`resolve`](BkSolver::resolve) accounts for edited incident
    /// capacities.
    pub fn mark_node(&mut self, i: NodeId) {
        self.marked.push(i.0);
    }

    /// Recomputes the maximum flow after capacity increases on arcs or
    /// terminals whose endpoints were marked.
    pub fn resolve(&mut self, g: &Graph<F>) {
        let marked = std::mem::take(&mut self.marked);
        for &i in &marked {
            let k = i as usize;
            // roots whose terminal capacity no longer supports their tree
            if self.parent[k] == PARENT_TERMINAL {
                let tr = g.tr_cap(NodeId(i));
                if (self.tree[k] == Tree::Source && tr <= F::zero())
                    || (self.tree[k] == Tree::Sink && tr >= F::zero())
                {
                    self.time += 1;
                    self.make_orphan(i);
                    self.adopt_orphans(g);
                }
            }
            // sink-tree node that acquired source capacity: drain it along
            // the tree path toward the sink
            while self.tree[k] == Tree::Sink
                && self.parent[k] != PARENT_ORPHAN
                && g.tr_cap(NodeId(i)) > F::zero()
            {
                self.time += 1;
                if !self.augment_source_contact(g, i) {
                    break;
                }
                self.adopt_orphans(g);
            }
            // source-tree node that acquired sink capacity: mirror case
            while self.tree[k] == Tree::Source
                && self.parent[k] != PARENT_ORPHAN
                && g.tr_cap(NodeId(i)) < F::zero()
            {
                self.time += 1;
                if !self.augment_sink_contact(g, i) {
                    break;
                }
                self.adopt_orphans(g);
            }
            match self.tree[k] {
                Tree::Free => {
                    let tr = g.tr_cap(NodeId(i));
                    if tr > F::zero() {
                        self.make_root(NodeId(i), Tree::Source);
                    } else if tr < F::zero() {
                        self.make_root(NodeId(i), Tree::Sink);
                    }
                }
                _ => self.activate(i),
            }
        }
        self.solve(g);
    }

    /// Augments from a fresh source contact at `i` (which sits in the sink
    /// tree) along its tree path. Returns false when no progress is possible.
    fn augment_source_contact(&mut self, g: &Graph<F>, i: u32) -> bool {
        let mut delta = g.tr_cap(NodeId(i));
        debug_assert!(delta > F::zero());
        let mut y = i;
        while self.parent[y as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[y as usize]);
            delta = delta.min(g.residual(pa));
            y = g.head_of(pa).0;
        }
        delta = delta.min(-g.tr_cap(NodeId(y)));
        if delta <= F::zero() {
            return false;
        }
        g.set_tr_cap(NodeId(i), g.tr_cap(NodeId(i)) - delta);
        let mut y = i;
        while self.parent[y as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[y as usize]);
            g.push_on(pa, delta);
            let next = g.head_of(pa).0;
            if g.residual(pa) == F::zero() {
                self.make_orphan(y);
            }
            y = next;
        }
        g.set_tr_cap(NodeId(y), g.tr_cap(NodeId(y)) + delta);
        if g.tr_cap(NodeId(y)) == F::zero() {
            self.make_orphan(y);
        }
        self.flow += delta;
        true
    }

    /// Mirror of `augment_source_contact` for a source-tree node that
    /// acquired sink capacity.
    fn augment_sink_contact(&mut self, g: &Graph<F>, i: u32) -> bool {
        let mut delta = -g.tr_cap(NodeId(i));
        debug_assert!(delta > F::zero());
        let mut x = i;
        while self.parent[x as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[x as usize]);
            delta = delta.min(g.residual(pa));
            x = g.tail_of(pa).0;
        }
        delta = delta.min(g.tr_cap(NodeId(x)));
        if delta <= F::zero() {
            return false;
        }
        g.set_tr_cap(NodeId(i), g.tr_cap(NodeId(i)) + delta);
        let mut x = i;
        while self.parent[x as usize] != PARENT_TERMINAL {
            let pa = ArcId(self.parent[x as usize]);
            g.push_on(pa, delta);
            let next = g.tail_of(pa).0;
            if g.residual(pa) == F::zero() {
                self.make_orphan(x);
            }
            x = next;
        }
        g.set_tr_cap(NodeId(x), g.tr_cap(NodeId(x)) - delta);
        if g.tr_cap(NodeId(x)) == F::zero() {
            self.make_orphan(x);
        }
        self.flow += delta;
        true
    }

    /// Copies `other`'s tree state for `nodes` into this solver; used when
    /// two block solvers are merged into one.
    pub(crate) fn absorb(&mut self, other: &BkSolver<F>, nodes: &[NodeId]) {
        for &i in nodes {
            let k = i.0 as usize;
            self.parent[k] = other.parent[k];
            self.tree[k] = other.tree[k];
            // stamps deliberately left stale: time is bumped below
            self.ts[k] = 0;
            self.dist[k] = other.dist[k];
        }
        self.time = self.time.max(other.time) + 1;
        self.flow += other.flow;
    }
}

/// Maximum flow and minimum cut of `g` via the augmenting-path solver.
/// Residual capacities in `g` reflect a feasible maximum flow afterwards.
pub fn bk_solve<F: Flow>(g: &Graph<F>) -> CutResult<F> {
    let mut solver = BkSolver::new(g.node_count());
    solver.init_all(g);
    solver.solve(g);
    solver.cut(g)
}
