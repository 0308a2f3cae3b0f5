//! Hochbaum pseudoflow solver.
//!
//! Maintains a forest of trees where only roots carry excess (surplus or
//! deficit) and a per-node label. Each step selects a surplus tree whose
//! lowest-labeled node is below the label bound, scans that node for a
//! residual arc into a lower-labeled node, and either merges (pushing the
//! entire surplus, limited only by individual arc capacities, splitting the
//! tree at every saturated arc) or increments the node's label.
//!
//! The four configurations pair the label selection rule (highest/lowest)
//! with the per-label bucket order (FIFO/LIFO).

use std::collections::VecDeque;

use crate::graph::{ArcId, CutResult, Graph, NodeId, Side};
use crate::Flow;

/// Tree-selection label rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelRule {
    Highest,
    Lowest,
}

/// Order in which trees filed under the same label are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BucketRule {
    Fifo,
    Lifo,
}

/// One of the four solver configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HpfConfig {
    pub label_rule: LabelRule,
    pub bucket_rule: BucketRule,
}

impl HpfConfig {
    pub const HIGHEST_FIFO: HpfConfig = HpfConfig {
        label_rule: LabelRule::Highest,
        bucket_rule: BucketRule::Fifo,
    };
    pub const HIGHEST_LIFO: HpfConfig = HpfConfig {
        label_rule: LabelRule::Highest,
        bucket_rule: BucketRule::Lifo,
    };
    pub const LOWEST_FIFO: HpfConfig = HpfConfig {
        label_rule: LabelRule::Lowest,
        bucket_rule: BucketRule::Fifo,
    };
    pub const LOWEST_LIFO: HpfConfig = HpfConfig {
        label_rule: LabelRule::Lowest,
        bucket_rule: BucketRule::Lifo,
    };

    pub const ALL: [HpfConfig; 4] = [
        HpfConfig::HIGHEST_FIFO,
        HpfConfig::HIGHEST_LIFO,
        HpfConfig::LOWEST_FIFO,
        HpfConfig::LOWEST_LIFO,
    ];
}

const NONE: u32 = u32::MAX;

struct HpfState<'g, F: Flow> {
    g: &'g Graph<F>,
    n: usize,
    /// label bound; counts the two implicit terminals so a node at the
    /// maximum possible residual distance is not priced out early
    cap: usize,
    cfg: HpfConfig,
    excess: Vec<F>,
    label: Vec<u32>,
    /// arc from child toward parent, NONE for roots
    parent_arc: Vec<u32>,
    first_child: Vec<u32>,
    next_sib: Vec<u32>,
    prev_sib: Vec<u32>,
    /// lowest label in the tree and the node attaining it; roots only
    min_label: Vec<u32>,
    min_node: Vec<u32>,
    // candidate roots per min label, with lazy invalidation
    buckets: Vec<VecDeque<u32>>,
    in_bucket: Vec<bool>,
    filed_label: Vec<u32>,
    top: usize,
    bottom: usize,
    // circular-scan cursors over an adjacency snapshot
    adj_start: Vec<u32>,
    adj: Vec<ArcId>,
    cursor: Vec<u32>,
}

impl<'g, F: Flow> HpfState<'g, F> {
    fn new(g: &'g Graph<F>, cfg: HpfConfig) -> Self {
        let n = g.node_count();
        let cap = n + 2;
        let mut adj_start = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(g.half_arc_count());
        adj_start.push(0);
        for u in g.nodes() {
            adj.extend(g.out_arcs(u));
            adj_start.push(adj.len() as u32);
        }
        let cursor = adj_start[..n].to_vec();
        HpfState {
            g,
            n,
            cap,
            cfg,
            excess: vec![F::zero(); n],
            label: vec![0; n],
            parent_arc: vec![NONE; n],
            first_child: vec![NONE; n],
            next_sib: vec![NONE; n],
            prev_sib: vec![NONE; n],
            min_label: vec![0; n],
            min_node: (0..n as u32).collect(),
            buckets: vec![VecDeque::new(); cap + 1],
            in_bucket: vec![false; n],
            filed_label: vec![0; n],
            top: 0,
            bottom: 0,
            adj_start,
            adj,
            cursor,
        }
    }

    fn detach(&mut self, c: u32) {
        if self.parent_arc[c as usize] == NONE {
            return;
        }
        let p = self.g.head_of(ArcId(self.parent_arc[c as usize])).0;
        let (pr, nx) = (self.prev_sib[c as usize], self.next_sib[c as usize]);
        if pr != NONE {
            self.next_sib[pr as usize] = nx;
        } else {
            self.first_child[p as usize] = nx;
        }
        if nx != NONE {
            self.prev_sib[nx as usize] = pr;
        }
        self.parent_arc[c as usize] = NONE;
        self.next_sib[c as usize] = NONE;
        self.prev_sib[c as usize] = NONE;
    }

    /// Hangs `c` under the head of `arc` (`arc` runs from c to the parent).
    fn attach(&mut self, c: u32, arc: ArcId) {
        debug_assert_eq!(self.parent_arc[c as usize], NONE);
        debug_assert_eq!(self.g.tail_of(arc).0, c);
        let p = self.g.head_of(arc).0;
        self.parent_arc[c as usize] = arc.0;
        let head = self.first_child[p as usize];
        self.next_sib[c as usize] = head;
        self.prev_sib[c as usize] = NONE;
        if head != NONE {
            self.prev_sib[head as usize] = c;
        }
        self.first_child[p as usize] = c;
    }

    /// Lowest-labeled node of the tree rooted at `r`, ties toward the
    /// smaller node id, by subtree walk.
    fn recompute_min(&mut self, r: u32) {
        let mut best = (self.label[r as usize], r);
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            let key = (self.label[v as usize], v);
            if key < best {
                best = key;
            }
            let mut c = self.first_child[v as usize];
            while c != NONE {
                stack.push(c);
                c = self.next_sib[c as usize];
            }
        }
        self.min_label[r as usize] = best.0;
        self.min_node[r as usize] = best.1;
    }

    /// Files root `r` as a selection candidate if it carries surplus and its
    /// lowest label is below the bound.
    fn file(&mut self, r: u32) {
        let rk = r as usize;
        if self.parent_arc[rk] != NONE {
            return;
        }
        let l = self.min_label[rk] as usize;
        if self.excess[rk] <= F::zero() || l >= self.cap {
            return;
        }
        if self.in_bucket[rk] && self.filed_label[rk] as usize == l {
            return;
        }
        self.in_bucket[rk] = true;
        self.filed_label[rk] = l as u32;
        self.buckets[l].push_back(r);
        self.top = self.top.max(l);
        self.bottom = self.bottom.min(l);
    }

    fn pop_level(&mut self, l: usize) -> Option<u32> {
        loop {
            let r = match self.cfg.bucket_rule {
                BucketRule::Fifo => self.buckets[l].pop_front()?,
                BucketRule::Lifo => self.buckets[l].pop_back()?,
            };
            let rk = r as usize;
            let fresh = self.in_bucket[rk] && self.filed_label[rk] as usize == l;
            if fresh
                && self.parent_arc[rk] == NONE
                && self.excess[rk] > F::zero()
                && self.min_label[rk] as usize == l
            {
                self.in_bucket[rk] = false;
                return Some(r);
            }
            if fresh {
                // latest filing no longer matches the root's state
                self.in_bucket[rk] = false;
                self.file(r);
            }
        }
    }

    fn next_candidate(&mut self) -> Option<u32> {
        match self.cfg.label_rule {
            LabelRule::Highest => loop {
                while self.top > 0 && self.buckets[self.top].is_empty() {
                    self.top -= 1;
                }
                if self.buckets[self.top].is_empty() {
                    return None;
                }
                if let Some(r) = self.pop_level(self.top) {
                    return Some(r);
                }
            },
            LabelRule::Lowest => loop {
                while self.bottom <= self.cap && self.buckets[self.bottom].is_empty() {
                    self.bottom += 1;
                }
                if self.bottom > self.cap {
                    return None;
                }
                if let Some(r) = self.pop_level(self.bottom) {
                    return Some(r);
                }
            },
        }
    }

    /// Circular scan of `i`'s arcs for a residual arc into a strictly
    /// lower-labeled node. The cursor persists across calls.
    fn find_merger_arc(&mut self, i: u32) -> Option<ArcId> {
        let ik = i as usize;
        let (start, end) = (self.adj_start[ik], self.adj_start[ik + 1]);
        if start == end {
            return None;
        }
        let li = self.label[ik];
        let len = end - start;
        let first = self.cursor[ik];
        for off in 0..len {
            let pos = start + (first - start + off) % len;
            let a = self.adj[pos as usize];
            if self.g.residual(a) > F::zero() && self.label[self.g.head_of(a).0 as usize] < li {
                self.cursor[ik] = start + (pos - start + 1) % len;
                return Some(a);
            }
        }
        None
    }

    /// Pushes the whole surplus of `root` along root -> i -> j -> root(j),
    /// re-rooting the source chain and splitting at saturated arcs.
    fn merge(&mut self, root: u32, i: u32, merger: ArcId) {
        let j = self.g.head_of(merger).0;
        debug_assert_eq!(self.g.tail_of(merger).0, i);

        // chain from root down to i
        let mut down = vec![i];
        let mut v = i;
        while v != root {
            v = self.g.head_of(ArcId(self.parent_arc[v as usize])).0;
            down.push(v);
        }
        down.reverse();

        // chain from j up to its root
        let mut up = vec![j];
        let mut w = j;
        while self.parent_arc[w as usize] != NONE {
            w = self.g.head_of(ArcId(self.parent_arc[w as usize])).0;
            up.push(w);
        }
        let target_root = *up.last().unwrap();
        debug_assert_ne!(root, target_root, "merger arc must connect two trees");

        // forward flow arcs along the full path
        let mut path_arcs: Vec<ArcId> = Vec::with_capacity(down.len() + up.len() - 1);
        for k in 0..down.len() - 1 {
            // the tree arc is (down[k+1] -> down[k]); flow runs the other way
            path_arcs.push(self.g.rev(ArcId(self.parent_arc[down[k + 1] as usize])));
        }
        path_arcs.push(merger);
        for k in 0..up.len() - 1 {
            path_arcs.push(ArcId(self.parent_arc[up[k] as usize]));
        }

        // re-hang the source chain so everything points toward target_root
        for k in 1..down.len() {
            self.detach(down[k]);
        }
        for (k, &u) in down.iter().enumerate() {
            self.detach(u);
            self.attach(u, path_arcs[k]);
        }

        let mut nodes = down;
        nodes.extend_from_slice(&up);

        // push the surplus forward, splitting where arcs saturate
        let mut carry = self.excess[root as usize];
        debug_assert!(carry > F::zero());
        self.excess[root as usize] = F::zero();
        let mut split_roots: Vec<u32> = Vec::new();
        for (k, &a) in path_arcs.iter().enumerate() {
            let cur = nodes[k];
            let f = carry.min(self.g.residual(a));
            if f > F::zero() {
                self.g.push_on(a, f);
            }
            let leftover = carry - f;
            if leftover > F::zero() || self.g.residual(a).is_zero() {
                // cur keeps what could not pass and roots its fragment
                self.detach(cur);
                self.excess[cur as usize] += leftover;
                split_roots.push(cur);
                if f.is_zero() {
                    carry = F::zero();
                    break;
                }
            }
            carry = f;
        }
        if carry > F::zero() {
            self.excess[target_root as usize] += carry;
        }

        // refresh min caches and candidate filings
        if split_roots.is_empty() {
            // whole source tree joined target_root: combine the caches
            let a = (self.min_label[root as usize], self.min_node[root as usize]);
            let b = (
                self.min_label[target_root as usize],
                self.min_node[target_root as usize],
            );
            let (ml, mn) = a.min(b);
            self.min_label[target_root as usize] = ml;
            self.min_node[target_root as usize] = mn;
        } else {
            for &r in &split_roots {
                if self.parent_arc[r as usize] == NONE {
                    self.recompute_min(r);
                    self.file(r);
                }
            }
            self.recompute_min(target_root);
        }
        self.file(target_root);

        #[cfg(debug_assertions)]
        for &v in &nodes {
            if self.parent_arc[v as usize] != NONE {
                assert!(
                    self.excess[v as usize].is_zero(),
                    "non-root {v} holds excess"
                );
            }
        }
    }

    fn run(&mut self) {
        // saturate all terminal arcs: every node becomes a singleton tree
        // whose excess is its folded terminal capacity
        for u in 0..self.n {
            let tr = self.g.tr_cap(NodeId(u as u32));
            if !tr.is_zero() {
                self.excess[u] = tr;
                self.g.set_tr_cap(NodeId(u as u32), F::zero());
            }
            self.file(u as u32);
        }

        while let Some(root) = self.next_candidate() {
            let i = self.min_node[root as usize];
            match self.find_merger_arc(i) {
                Some(a) => self.merge(root, i, a),
                None => {
                    self.label[i as usize] += 1;
                    self.recompute_min(root);
                    self.file(root);
                }
            }
        }
    }
}

/// Minimum cut of `g` with the Hochbaum pseudoflow algorithm under the given
/// configuration. Computes the cut only; the feasible maximum flow is not
/// recovered.
pub fn hpf_solve<F: Flow>(g: &Graph<F>, cfg: HpfConfig) -> CutResult<F> {
    let mut st = HpfState::new(g, cfg);
    st.run();

    // source side: remaining surpluses plus their residual closure
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
    debug_assert!(
        (0..st.n).all(|u| side[u] == Side::Sink || st.excess[u] >= F::zero()),
        "a remaining deficit is reachable from a surplus: not terminated"
    );
    let flow_value = g.cut_capacity(&side);
    CutResult { flow_value, side }
}
