//! Generic preflow push-relabel solver.
//!
//! Computes the minimum cut only: the run stops as soon as every node with
//! excess carries a label of at least `n`, at which point the labels encode
//! the cut (label >= n -> source side). The two-phase restoration that pushes
//! leftover excess back to the source is deliberately not implemented.
//!
//! Heuristics: global relabeling by backward breadth-first search from the
//! sink every `global_relabel_every` relabel operations, and the gap
//! heuristic that lifts every node stranded above an emptied label level.

use std::collections::VecDeque;

use crate::graph::{ArcId, CutResult, Graph, NodeId, Side};
use crate::Flow;

/// Active-node selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PprSelection {
    /// First-in-first-out queue of active nodes.
    Fifo,
    /// Always discharge an active node with the highest label.
    HighestLabel,
}

const NONE: u32 = u32::MAX;

struct PprState<'g, F: Flow> {
    g: &'g Graph<F>,
    n: usize,
    /// label bound: the node count including the two implicit terminals,
    /// so a node at the maximum possible residual distance stays active
    limit: usize,
    // adjacency snapshot so current-arc cursors are plain indices
    adj_start: Vec<u32>,
    adj: Vec<ArcId>,
    cursor: Vec<u32>,
    excess: Vec<F>,
    label: Vec<u32>,
    label_count: Vec<u32>,
    absorbed: F,
    relabels: u32,
    global_every: usize,
    global_pending: bool,
    // FIFO selection
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    // highest-label selection: doubly-linked buckets indexed by label
    bucket_head: Vec<u32>,
    bucket_next: Vec<u32>,
    bucket_prev: Vec<u32>,
    in_bucket: Vec<bool>,
    top: usize,
    sel: PprSelection,
}

impl<'g, F: Flow> PprState<'g, F> {
    fn new(g: &'g Graph<F>, sel: PprSelection, global_every: usize) -> Self {
        let n = g.node_count();
        let mut adj_start = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(g.half_arc_count());
        adj_start.push(0);
        for u in g.nodes() {
            adj.extend(g.out_arcs(u));
            adj_start.push(adj.len() as u32);
        }
        let limit = n + 2;
        PprState {
            g,
            n,
            limit,
            adj_start,
            adj,
            cursor: vec![0; n],
            excess: vec![F::zero(); n],
            label: vec![0; n],
            label_count: vec![0; limit + 1],
            absorbed: F::zero(),
            relabels: 0,
            global_every,
            global_pending: false,
            queue: VecDeque::new(),
            queued: vec![false; n],
            bucket_head: vec![NONE; limit + 1],
            bucket_next: vec![NONE; n],
            bucket_prev: vec![NONE; n],
            in_bucket: vec![false; n],
            top: 0,
            sel,
        }
    }

    fn arc_range(&self, u: usize) -> (u32, u32) {
        (self.adj_start[u], self.adj_start[u + 1])
    }

    /// Backward BFS from the sink over residual arcs; unreachable nodes get
    /// label n. Rebuilds the active structures.
    fn global_relabel(&mut self) {
        let n = self.n;
        let lim = self.limit as u32;
        for c in self.label_count.iter_mut() {
            *c = 0;
        }
        let mut d = vec![lim; n];
        let mut bfs = VecDeque::new();
        for u in 0..n {
            if self.g.tr_cap(NodeId(u as u32)) < F::zero() {
                d[u] = 1;
                bfs.push_back(u as u32);
            }
        }
        while let Some(v) = bfs.pop_front() {
            let dv = d[v as usize];
            for a in self.g.out_arcs(NodeId(v)) {
                // residual arc (q -> v) puts q one step farther from t
                let q = self.g.head_of(a).0 as usize;
                if d[q] == lim && self.g.residual(self.g.rev(a)) > F::zero() {
                    d[q] = dv + 1;
                    bfs.push_back(q as u32);
                }
            }
        }
        self.label = d;
        for u in 0..n {
            let l = self.label[u];
            if (l as usize) < self.limit {
                self.label_count[l as usize] += 1;
            }
            self.cursor[u] = self.adj_start[u];
        }
        // rebuild actives
        self.queue.clear();
        self.queued.iter_mut().for_each(|q| *q = false);
        self.bucket_head.iter_mut().for_each(|h| *h = NONE);
        self.in_bucket.iter_mut().for_each(|b| *b = false);
        self.top = 0;
        for u in 0..n {
            if self.excess[u] > F::zero() && (self.label[u] as usize) < self.limit {
                self.activate(u as u32);
            }
        }
        self.global_pending = false;
    }

    fn activate(&mut self, u: u32) {
        if (self.label[u as usize] as usize) >= self.limit {
            return;
        }
        match self.sel {
            PprSelection::Fifo => {
                if !self.queued[u as usize] {
                    self.queued[u as usize] = true;
                    self.queue.push_back(u);
                }
            }
            PprSelection::HighestLabel => {
                if !self.in_bucket[u as usize] {
                    self.in_bucket[u as usize] = true;
                    let l = self.label[u as usize] as usize;
                    let head = self.bucket_head[l];
                    self.bucket_next[u as usize] = head;
                    self.bucket_prev[u as usize] = NONE;
                    if head != NONE {
                        self.bucket_prev[head as usize] = u;
                    }
                    self.bucket_head[l] = u;
                    self.top = self.top.max(l);
                }
            }
        }
    }

    fn bucket_remove(&mut self, u: u32, l: usize) {
        let (p, nx) = (self.bucket_prev[u as usize], self.bucket_next[u as usize]);
        if p != NONE {
            self.bucket_next[p as usize] = nx;
        } else {
            self.bucket_head[l] = nx;
        }
        if nx != NONE {
            self.bucket_prev[nx as usize] = p;
        }
        self.in_bucket[u as usize] = false;
    }

    fn next_active(&mut self) -> Option<u32> {
        match self.sel {
            PprSelection::Fifo => loop {
                let u = self.queue.pop_front()?;
                self.queued[u as usize] = false;
                if self.excess[u as usize] > F::zero()
                    && (self.label[u as usize] as usize) < self.limit
                {
                    return Some(u);
                }
            },
            PprSelection::HighestLabel => loop {
                while self.top > 0 && self.bucket_head[self.top] == NONE {
                    self.top -= 1;
                }
                let u = self.bucket_head[self.top];
                if u == NONE {
                    return None;
                }
                self.bucket_remove(u, self.top);
                if self.excess[u as usize] > F::zero()
                    && (self.label[u as usize] as usize) < self.limit
                {
                    return Some(u);
                }
            },
        }
    }

    /// Pushes from `u` until its excess is gone, it rises to label n, or a
    /// global relabel comes due.
    fn discharge(&mut self, u: u32) {
        let uk = u as usize;
        while self.excess[uk] > F::zero() {
            // the folded sink arc behaves like a neighbor at label 0
            if self.label[uk] == 1 && self.g.tr_cap(NodeId(u)) < F::zero() {
                let delta = self.excess[uk].min(-self.g.tr_cap(NodeId(u)));
                self.g
                    .set_tr_cap(NodeId(u), self.g.tr_cap(NodeId(u)) + delta);
                self.excess[uk] -= delta;
                self.absorbed += delta;
                continue;
            }
            let (_, end) = self.arc_range(uk);
            if self.cursor[uk] < end {
                let a = self.adj[self.cursor[uk] as usize];
                let v = self.g.head_of(a).0;
                if self.g.residual(a) > F::zero() && self.label[uk] == self.label[v as usize] + 1 {
                    let delta = self.excess[uk].min(self.g.residual(a));
                    self.g.push_on(a, delta);
                    self.excess[uk] -= delta;
                    let was_zero = self.excess[v as usize].is_zero();
                    self.excess[v as usize] += delta;
                    if was_zero {
                        self.activate(v);
                    }
                } else {
                    self.cursor[uk] += 1;
                }
                continue;
            }
            self.relabel(u);
            if self.global_pending || (self.label[uk] as usize) >= self.limit {
                return;
            }
        }
    }

    fn relabel(&mut self, u: u32) {
        let uk = u as usize;
        let old = self.label[uk] as usize;
        self.label_count[old] -= 1;

        let mut new_d = self.limit as u32;
        if self.g.tr_cap(NodeId(u)) < F::zero() {
            new_d = 1;
        }
        let (start, end) = self.arc_range(uk);
        for ci in start..end {
            let a = self.adj[ci as usize];
            if self.g.residual(a) > F::zero() {
                let cand = self.label[self.g.head_of(a).0 as usize] + 1;
                new_d = new_d.min(cand);
            }
        }
        self.label[uk] = new_d.min(self.limit as u32);
        if (self.label[uk] as usize) < self.limit {
            self.label_count[self.label[uk] as usize] += 1;
        }
        self.cursor[uk] = self.adj_start[uk];

        // gap heuristic: an emptied level strands everything above it
        if old >= 1 && old < self.limit && self.label_count[old] == 0 {
            for w in 0..self.n {
                let lw = self.label[w] as usize;
                if lw > old && lw < self.limit {
                    self.label_count[lw] -= 1;
                    self.label[w] = self.limit as u32;
                }
            }
        }

        self.relabels += 1;
        if self.global_every > 0 && self.relabels as usize % self.global_every == 0 {
            self.global_pending = true;
        }
    }

    #[cfg(debug_assertions)]
    fn validate_labels(&self) {
        let lim = self.limit as u32;
        for u in 0..self.n {
            if self.g.tr_cap(NodeId(u as u32)) < F::zero() {
                assert!(self.label[u] <= 1, "steep drop on a residual sink arc");
            }
            for a in self.g.out_arcs(NodeId(u as u32)) {
                if self.g.residual(a) > F::zero() {
                    let v = self.g.head_of(a).0 as usize;
                    assert!(
                        self.label[u].min(lim) <= self.label[v].min(lim) + 1,
                        "steep drop on residual arc {} -> {}",
                        u,
                        v
                    );
                }
            }
        }
    }

    fn run(&mut self) {
        // saturate the source arcs
        for u in 0..self.n {
            let tr = self.g.tr_cap(NodeId(u as u32));
            if tr > F::zero() {
                self.excess[u] = tr;
                self.g.set_tr_cap(NodeId(u as u32), F::zero());
            }
        }
        self.global_relabel();
        #[cfg(debug_assertions)]
        self.validate_labels();
        while let Some(u) = self.next_active() {
            self.discharge(u);
            if self.global_pending {
                self.global_relabel();
                #[cfg(debug_assertions)]
                self.validate_labels();
            } else if self.excess[u as usize] > F::zero()
                && (self.label[u as usize] as usize) < self.limit
            {
                self.activate(u);
            }
        }
        #[cfg(debug_assertions)]
        self.validate_labels();
    }
}

/// Minimum cut of `g` by preflow push-relabel.
///
/// Terminates early once every node with excess has a label of at least `n`;
/// the side assignment is read off the labels and the flow value is the
/// capacity of that cut. `global_relabel_every` counts relabel operations
/// between global relabelings (0 disables them; `n` is the usual choice).
pub fn ppr_solve<F: Flow>(
    g: &Graph<F>,
    sel: PprSelection,
    global_relabel_every: usize,
) -> CutResult<F> {
    let mut st = PprState::new(g, sel, global_relabel_every);
    st.run();
    // Source side: stranded excess (all of it sits at label >= limit now)
    // plus everything it still reaches in the residual graph. Nodes that no
    // excess can reach go to the sink side, so a graph without terminals
    // comes out all-sink.
    let mut side = vec![Side::Sink; st.n];
    let mut bfs: VecDeque<u32> = (0..st.n as u32)
        .filter(|&u| st.excess[u as usize] > F::zero())
        .collect();
    for &u in &bfs {
        side[u as usize] = Side::Source;
    }
    while let Some(u) = bfs.pop_front() {
        for a in g.out_arcs(NodeId(u)) {
            let v = g.head_of(a).0 as usize;
            if g.residual(a) > F::zero() && side[v] == Side::Sink {
                side[v] = Side::Source;
                bfs.push_back(v as u32);
            }
        }
    }
    let flow_value = g.cut_capacity(&side);
    debug_assert_eq!(
        flow_value,
        st.absorbed + g.flow_constant(),
        "absorbed flow must equal the cut capacity at termination"
    );
    CutResult { flow_value, side }
}
