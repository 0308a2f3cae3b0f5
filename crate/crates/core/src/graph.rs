//! Compact index-addressed directed graph with residual-capacity semantics.
//!
//! Terminal arcs are folded into a single signed per-node capacity plus a
//! global flow constant. Neighbor arcs are stored as pairs of half-arcs; in
//! the default (unpacked) layout the reverse of arc `a` is `a ^ 1` and the
//! outgoing arcs of a node form a linked list. Packing reorders half-arcs
//! with a stable counting sort by tail so each node's outgoing arcs occupy
//! one contiguous range, re-fixing the reverse pairing with an explicit
//! table.

use std::cell::UnsafeCell;
use std::collections::HashMap;
use std::fmt;

use crate::Flow;

/// Index of a non-terminal node. Terminals are implicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Index of a directed half-arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of the cut a node ends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Sink,
}

/// Maximum flow value and the side assignment of a minimum cut.
#[derive(Debug, Clone)]
pub struct CutResult<F> {
    /// Max-flow value, including the folded flow constant.
    pub flow_value: F,
    /// Per-node side; terminals implicitly satisfy `s ∈ S`, `t ∈ T`.
    pub side: Vec<Side>,
}

impl<F: Flow> CutResult<F> {
    pub fn side_of(&self, i: NodeId) -> Side {
        self.side[i.0 as usize]
    }

    pub fn source_set(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.side
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Side::Source)
            .map(|(i, _)| NodeId(i as u32))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("node count {0} exceeds the 32-bit index range")]
    IndexRange(usize),
    #[error("capacity exceeds the declared bound (2^62 for 64-bit capacities)")]
    Overflow,
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("node {0} out of range (node count {1})")]
    NodeRange(NodeId, u32),
    #[error("negative capacity")]
    NegativeCapacity,
}

/// Residual-capacity cell.
///
/// Plain load/store semantics. `Sync` is sound only under the crate's block
/// discipline: a solver holds exclusive access to the cells of its block, and
/// the parallel module never lets two workers touch the same block.
pub(crate) struct ResCell<F>(UnsafeCell<F>);

unsafe impl<F: Send> Sync for ResCell<F> {}

impl<F: Copy> ResCell<F> {
    fn new(v: F) -> Self {
        ResCell(UnsafeCell::new(v))
    }

    #[inline]
    pub(crate) fn get(&self) -> F {
        unsafe { *self.0.get() }
    }

    #[inline]
    pub(crate) fn set(&self, v: F) {
        unsafe { *self.0.get() = v }
    }
}

impl<F: Copy> Clone for ResCell<F> {
    fn clone(&self) -> Self {
        ResCell::new(self.get())
    }
}

impl<F: Copy + fmt::Debug> fmt::Debug for ResCell<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.get().fmt(f)
    }
}

const NONE: u32 = u32::MAX;

/// Accumulates terminal capacities and half-arc pairs before freezing them
/// into a [`Graph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder<F> {
    node_count: u32,
    // unfolded per-node sums of added source / sink capacities
    source_sum: Vec<F>,
    sink_sum: Vec<F>,
    flow_constant: F,
    cut_constant: F,
    // half-arcs in pair order: tail, head, capacity
    tail: Vec<u32>,
    head: Vec<u32>,
    cap: Vec<F>,
    pair_index: HashMap<(u32, u32), u32>,
    total: F,
}

impl<F: Flow> GraphBuilder<F> {
    /// Empty builder with zeroed terminal capacities.
    pub fn new(node_count: usize, expected_arcs: usize) -> Result<Self, BuildError> {
        if node_count == 0 || node_count >= u32::MAX as usize {
            return Err(BuildError::IndexRange(node_count));
        }
        Ok(GraphBuilder {
            node_count: node_count as u32,
            source_sum: vec![F::zero(); node_count],
            sink_sum: vec![F::zero(); node_count],
            flow_constant: F::zero(),
            cut_constant: F::zero(),
            tail: Vec::with_capacity(2 * expected_arcs),
            head: Vec::with_capacity(2 * expected_arcs),
            cap: Vec::with_capacity(2 * expected_arcs),
            pair_index: HashMap::new(),
            total: F::zero(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count as usize
    }

    /// Number of half-arc pairs added so far.
    pub fn pair_count(&self) -> usize {
        self.tail.len() / 2
    }

    /// Net folded terminal capacity of node `i` so far.
    pub fn tr_cap(&self, i: NodeId) -> F {
        self.source_sum[i.0 as usize] - self.sink_sum[i.0 as usize]
    }

    /// Flow collected by terminal folding: `Σ_i min(Σ c_si, Σ c_it)`.
    pub fn flow_constant(&self) -> F {
        self.flow_constant
    }

    /// Direct source-to-sink capacity folded at build; on every cut.
    pub fn cut_constant(&self) -> F {
        self.cut_constant
    }

    fn check_cap(&mut self, c: F) -> Result<(), BuildError> {
        if c < F::zero() {
            return Err(BuildError::NegativeCapacity);
        }
        if c > F::huge() {
            return Err(BuildError::Overflow);
        }
        self.total = self.total.checked_add(&c).ok_or(BuildError::Overflow)?;
        if self.total > F::huge() {
            return Err(BuildError::Overflow);
        }
        Ok(())
    }

    fn check_node(&self, i: NodeId) -> Result<(), BuildError> {
        if i.0 >= self.node_count {
            return Err(BuildError::NodeRange(i, self.node_count));
        }
        Ok(())
    }

    /// Folds a direct source-to-sink capacity into the flow constant; such
    /// an arc is on every cut.
    pub fn add_constant(&mut self, c: F) -> Result<(), BuildError> {
        self.check_cap(c)?;
        self.flow_constant += c;
        self.cut_constant += c;
        Ok(())
    }

    /// Folds `c_si` and `c_it` into node `i`'s combined terminal capacity.
    ///
    /// Repeated calls are equivalent to one call with summed capacities.
    pub fn add_terminal(&mut self, i: NodeId, c_si: F, c_it: F) -> Result<(), BuildError> {
        self.check_node(i)?;
        self.check_cap(c_si)?;
        self.check_cap(c_it)?;
        let k = i.0 as usize;
        self.flow_constant -= self.source_sum[k].min(self.sink_sum[k]);
        self.source_sum[k] = self.source_sum[k]
            .checked_add(&c_si)
            .ok_or(BuildError::Overflow)?;
        self.sink_sum[k] = self.sink_sum[k]
            .checked_add(&c_it)
            .ok_or(BuildError::Overflow)?;
        self.flow_constant += self.source_sum[k].min(self.sink_sum[k]);
        Ok(())
    }

    /// Appends a half-arc pair `(u→v, cap)` / `(v→u, rev_cap)`.
    ///
    /// With `merge` set, an existing pair between `u` and `v` (either
    /// orientation) absorbs the capacities instead of a new pair being added.
    pub fn add_edge(
        &mut self,
        u: NodeId,
        v: NodeId,
        cap: F,
        rev_cap: F,
        merge: bool,
    ) -> Result<(), BuildError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(BuildError::SelfLoop(u));
        }
        self.check_cap(cap)?;
        self.check_cap(rev_cap)?;
        if merge {
            if let Some(&a) = self.pair_index.get(&(u.0, v.0)) {
                self.cap[a as usize] += cap;
                self.cap[a as usize ^ 1] += rev_cap;
                return Ok(());
            }
            if let Some(&a) = self.pair_index.get(&(v.0, u.0)) {
                self.cap[a as usize] += rev_cap;
                self.cap[a as usize ^ 1] += cap;
                return Ok(());
            }
        }
        let id = self.tail.len() as u32;
        if id == u32::MAX - 1 {
            return Err(BuildError::IndexRange(self.tail.len()));
        }
        self.tail.push(u.0);
        self.head.push(v.0);
        self.cap.push(cap);
        self.tail.push(v.0);
        self.head.push(u.0);
        self.cap.push(rev_cap);
        self.pair_index.entry((u.0, v.0)).or_insert(id);
        Ok(())
    }

    /// Freezes the builder into a graph.
    ///
    /// With `pack`, half-arcs are stably reordered (counting sort by tail) so
    /// each node's outgoing arcs are contiguous and the reverse pairing is
    /// re-fixed; solver results are unaffected either way.
    pub fn build(&self, pack: bool) -> Graph<F> {
        let n = self.node_count as usize;
        let m = self.tail.len();
        let tr_cap: Vec<ResCell<F>> = (0..n)
            .map(|i| ResCell::new(self.source_sum[i] - self.sink_sum[i]))
            .collect();

        if pack {
            // stable counting sort of half-arcs by tail
            let mut counts = vec![0u32; n + 1];
            for &t in &self.tail {
                counts[t as usize + 1] += 1;
            }
            for i in 0..n {
                counts[i + 1] += counts[i];
            }
            let first_out = counts.clone();
            let mut pos = counts;
            let mut perm = vec![0u32; m]; // old half-arc id -> new slot
            for (a, &t) in self.tail.iter().enumerate() {
                perm[a] = pos[t as usize];
                pos[t as usize] += 1;
            }
            let mut head = vec![0u32; m];
            let mut orig_cap = vec![F::zero(); m];
            let mut rev = vec![0u32; m];
            for a in 0..m {
                let slot = perm[a] as usize;
                head[slot] = self.head[a];
                orig_cap[slot] = self.cap[a];
                rev[slot] = perm[a ^ 1];
            }
            let r_cap = orig_cap.iter().map(|&c| ResCell::new(c)).collect();
            Graph {
                node_count: self.node_count,
                packed: true,
                first_out,
                next_out: Vec::new(),
                rev,
                head,
                orig_cap,
                r_cap,
                orig_src: self.source_sum.clone(),
                orig_snk: self.sink_sum.clone(),
                tr_cap,
                cut_constant: self.cut_constant,
                flow_constant: self.flow_constant,
            }
        } else {
            let mut first_out = vec![NONE; n];
            let mut next_out = vec![NONE; m];
            // build the per-node lists back to front so traversal follows
            // insertion order
            for a in (0..m).rev() {
                let t = self.tail[a] as usize;
                next_out[a] = first_out[t];
                first_out[t] = a as u32;
            }
            let r_cap = self.cap.iter().map(|&c| ResCell::new(c)).collect();
            Graph {
                node_count: self.node_count,
                packed: false,
                first_out,
                next_out,
                rev: Vec::new(),
                head: self.head.clone(),
                orig_cap: self.cap.clone(),
                r_cap,
                orig_src: self.source_sum.clone(),
                orig_snk: self.sink_sum.clone(),
                tr_cap,
                cut_constant: self.cut_constant,
                flow_constant: self.flow_constant,
            }
        }
    }
}

/// Immutable topology plus mutable residual capacities.
///
/// Solvers mutate `r_cap`/`tr_cap` in place; `r_cap(a) + r_cap(rev(a))` is
/// conserved per pair. Original capacities are retained so cut capacities can
/// be evaluated after a solve.
pub struct Graph<F> {
    node_count: u32,
    packed: bool,
    /// packed: offsets, length n+1; unpacked: list heads, length n
    first_out: Vec<u32>,
    /// unpacked only: next outgoing half-arc per half-arc
    next_out: Vec<u32>,
    /// packed only: reverse half-arc per half-arc
    rev: Vec<u32>,
    head: Vec<u32>,
    orig_cap: Vec<F>,
    r_cap: Vec<ResCell<F>>,
    /// original terminal capacity sums, unfolded
    orig_src: Vec<F>,
    orig_snk: Vec<F>,
    tr_cap: Vec<ResCell<F>>,
    /// direct source-to-sink capacity: part of every cut
    cut_constant: F,
    /// flow collected by folding; `value = pushed + flow_constant`
    flow_constant: F,
}

impl<F: Copy> Clone for Graph<F> {
    fn clone(&self) -> Self {
        Graph {
            node_count: self.node_count,
            packed: self.packed,
            first_out: self.first_out.clone(),
            next_out: self.next_out.clone(),
            rev: self.rev.clone(),
            head: self.head.clone(),
            orig_cap: self.orig_cap.clone(),
            r_cap: self.r_cap.clone(),
            orig_src: self.orig_src.clone(),
            orig_snk: self.orig_snk.clone(),
            tr_cap: self.tr_cap.clone(),
            cut_constant: self.cut_constant,
            flow_constant: self.flow_constant,
        }
    }
}

impl<F: Copy + fmt::Debug> fmt::Debug for Graph<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("node_count", &self.node_count)
            .field("pair_count", &(self.head.len() / 2))
            .field("packed", &self.packed)
            .field("flow_constant", &self.flow_constant)
            .finish_non_exhaustive()
    }
}

impl<F: Flow> Graph<F> {
    pub fn node_count(&self) -> usize {
        self.node_count as usize
    }

    /// Directed half-arc count (`2 m_N`).
    pub fn half_arc_count(&self) -> usize {
        self.head.len()
    }

    /// Undirected neighbor-arc count (`m_N`).
    pub fn pair_count(&self) -> usize {
        self.head.len() / 2
    }

    /// Terminal-arc count: one per nonzero original source capacity plus
    /// one per nonzero original sink capacity.
    pub fn terminal_arc_count(&self) -> usize {
        self.orig_src.iter().filter(|t| !t.is_zero()).count()
            + self.orig_snk.iter().filter(|t| !t.is_zero()).count()
    }

    pub fn is_packed(&self) -> bool {
        self.packed
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    #[inline]
    pub fn rev(&self, a: ArcId) -> ArcId {
        if self.packed {
            ArcId(self.rev[a.0 as usize])
        } else {
            ArcId(a.0 ^ 1)
        }
    }

    #[inline]
    pub fn head_of(&self, a: ArcId) -> NodeId {
        NodeId(self.head[a.0 as usize])
    }

    #[inline]
    pub fn tail_of(&self, a: ArcId) -> NodeId {
        self.head_of(self.rev(a))
    }

    /// Outgoing half-arcs of `u`, in storage order.
    #[inline]
    pub fn out_arcs(&self, u: NodeId) -> OutArcs<'_, F> {
        if self.packed {
            OutArcs {
                graph: self,
                cursor: self.first_out[u.0 as usize],
                end: self.first_out[u.0 as usize + 1],
                packed: true,
            }
        } else {
            OutArcs {
                graph: self,
                cursor: self.first_out[u.0 as usize],
                end: NONE,
                packed: false,
            }
        }
    }

    /// Residual capacity `c'_a = c_a - f_a` of half-arc `a`.
    #[inline]
    pub fn residual(&self, a: ArcId) -> F {
        self.r_cap[a.0 as usize].get()
    }

    /// Pushes `amount` along `a`, moving residual to the reverse half-arc.
    #[inline]
    pub fn push_on(&self, a: ArcId, amount: F) {
        let ra = self.rev(a);
        let cell = &self.r_cap[a.0 as usize];
        cell.set(cell.get() - amount);
        let rcell = &self.r_cap[ra.0 as usize];
        rcell.set(rcell.get() + amount);
    }

    pub(crate) fn set_residual(&self, a: ArcId, v: F) {
        self.r_cap[a.0 as usize].set(v);
    }

    /// Residual net terminal capacity: positive = residual source arc,
    /// negative = residual sink arc.
    #[inline]
    pub fn tr_cap(&self, i: NodeId) -> F {
        self.tr_cap[i.0 as usize].get()
    }

    #[inline]
    pub(crate) fn set_tr_cap(&self, i: NodeId, v: F) {
        self.tr_cap[i.0 as usize].set(v);
    }

    pub fn orig_cap(&self, a: ArcId) -> F {
        self.orig_cap[a.0 as usize]
    }

    /// Net original terminal capacity (source minus sink sums).
    pub fn orig_tr(&self, i: NodeId) -> F {
        self.orig_src[i.0 as usize] - self.orig_snk[i.0 as usize]
    }

    /// Original source-arc capacity sum of node `i`.
    pub fn orig_src(&self, i: NodeId) -> F {
        self.orig_src[i.0 as usize]
    }

    /// Original sink-arc capacity sum of node `i`.
    pub fn orig_snk(&self, i: NodeId) -> F {
        self.orig_snk[i.0 as usize]
    }

    pub fn flow_constant(&self) -> F {
        self.flow_constant
    }

    /// Direct source-to-sink capacity folded at build; on every cut.
    pub fn cut_constant(&self) -> F {
        self.cut_constant
    }

    /// Raises node `i`'s terminal capacities by `c_si`/`c_it`. This is the
    /// sanctioned terminal edit for dynamic re-solves: the part of the new
    /// capacity that cancels against the node's residual terminal capacity
    /// is an immediate source-to-sink flow through `i` and folds into the
    /// flow constant; the rest lands in the residual.
    pub fn increase_terminal(&mut self, i: NodeId, c_si: F, c_it: F) {
        debug_assert!(c_si >= F::zero() && c_it >= F::zero());
        let k = i.0 as usize;
        self.orig_src[k] += c_si;
        self.orig_snk[k] += c_it;
        let r = self.tr_cap[k].get();
        let avail_s = r.max(F::zero()) + c_si;
        let avail_t = (-r).max(F::zero()) + c_it;
        self.flow_constant += avail_s.min(avail_t);
        self.tr_cap[k].set(r + c_si - c_it);
    }

    /// Raises the capacities of half-arc `a` and its reverse.
    pub fn increase_arc(&mut self, a: ArcId, fwd: F, rev: F) {
        debug_assert!(fwd >= F::zero() && rev >= F::zero());
        let r = self.rev(a).0 as usize;
        let k = a.0 as usize;
        self.orig_cap[k] += fwd;
        self.orig_cap[r] += rev;
        self.r_cap[k].set(self.r_cap[k].get() + fwd);
        self.r_cap[r].set(self.r_cap[r].get() + rev);
    }

    /// Restores all residual capacities to the original capacities.
    pub fn reset_residuals(&mut self) {
        for (cell, &c) in self.r_cap.iter().zip(&self.orig_cap) {
            cell.set(c);
        }
        self.flow_constant = self.cut_constant;
        for k in 0..self.node_count as usize {
            self.tr_cap[k].set(self.orig_src[k] - self.orig_snk[k]);
            self.flow_constant += self.orig_src[k].min(self.orig_snk[k]);
        }
    }

    /// Capacity of the cut induced by `side`, evaluated on the original
    /// capacities: the direct source-to-sink constant, the sink arcs of
    /// source-side nodes, the source arcs of sink-side nodes, and all
    /// neighbor arcs from the source side to the sink side.
    pub fn cut_capacity(&self, side: &[Side]) -> F {
        assert_eq!(side.len(), self.node_count as usize);
        let mut total = self.cut_constant;
        for i in 0..self.node_count as usize {
            match side[i] {
                Side::Source => total += self.orig_snk[i],
                Side::Sink => total += self.orig_src[i],
            }
        }
        for u in self.nodes() {
            if side[u.0 as usize] == Side::Source {
                for a in self.out_arcs(u) {
                    if side[self.head_of(a).0 as usize] == Side::Sink {
                        total += self.orig_cap(a);
                    }
                }
            }
        }
        total
    }

    /// Bytes held by this graph's buffers (this implementation's actual
    /// storage, distinct from the reference-model formulas in [`crate::mem`]).
    pub fn memory_bytes(&self) -> usize {
        use std::mem::size_of;
        let f = size_of::<F>();
        self.first_out.len() * 4
            + self.next_out.len() * 4
            + self.rev.len() * 4
            + self.head.len() * 4
            + self.orig_cap.len() * f
            + self.r_cap.len() * f
            + self.orig_src.len() * f
            + self.orig_snk.len() * f
            + self.tr_cap.len() * f
    }
}

/// Iterator over the outgoing half-arcs of one node.
pub struct OutArcs<'g, F> {
    graph: &'g Graph<F>,
    cursor: u32,
    end: u32,
    packed: bool,
}

impl<F> Iterator for OutArcs<'_, F> {
    type Item = ArcId;

    #[inline]
    fn next(&mut self) -> Option<ArcId> {
        if self.packed {
            if self.cursor == self.end {
                return None;
            }
            let a = self.cursor;
            self.cursor += 1;
            Some(ArcId(a))
        } else {
            if self.cursor == NONE {
                return None;
            }
            let a = self.cursor;
            self.cursor = self.graph.next_out[a as usize];
            Some(ArcId(a))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bk::bk_solve;
    use crate::Cap;

    #[test]
    fn empty_builder() {
        let b = GraphBuilder::<Cap>::new(3, 4).unwrap();
        assert_eq!(b.node_count(), 3);
        assert_eq!(b.pair_count(), 0);
    }

    #[test]
    fn node_count_exceeding_index_range() {
        assert!(matches!(
            GraphBuilder::<Cap>::new(1 << 32, 0),
            Err(BuildError::IndexRange(_))
        ));
    }

    #[test]
    fn single_node_no_arcs() {
        let b = GraphBuilder::<Cap>::new(1, 0).unwrap();
        let g = b.build(false);
        let cut = bk_solve(&g);
        assert_eq!(cut.flow_value, 0);
    }

    #[test]
    fn terminal_folding_identity() {
        let mut b = GraphBuilder::<Cap>::new(1, 0).unwrap();
        b.add_terminal(NodeId(0), 5, 3).unwrap();
        assert_eq!(b.tr_cap(NodeId(0)), 2);
        assert_eq!(b.flow_constant(), 3);
    }

    #[test]
    fn terminal_folding_accumulates() {
        let mut b = GraphBuilder::<Cap>::new(1, 0).unwrap();
        b.add_terminal(NodeId(0), 5, 3).unwrap();
        b.add_terminal(NodeId(0), 0, 4).unwrap();
        assert_eq!(b.tr_cap(NodeId(0)), -2);
        assert_eq!(b.flow_constant(), 5);
    }

    #[test]
    fn terminal_zero_is_noop() {
        let mut b = GraphBuilder::<Cap>::new(1, 0).unwrap();
        b.add_terminal(NodeId(0), 0, 0).unwrap();
        assert_eq!(b.tr_cap(NodeId(0)), 0);
        assert_eq!(b.flow_constant(), 0);
    }

    #[test]
    fn merge_sums_capacities() {
        let mut b = GraphBuilder::<Cap>::new(2, 2).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 3, 0, true).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 4, 0, true).unwrap();
        assert_eq!(b.pair_count(), 1);
        let g = b.build(false);
        assert_eq!(g.orig_cap(ArcId(0)), 7);
    }

    #[test]
    fn merge_reversed_orientation() {
        let mut b = GraphBuilder::<Cap>::new(2, 2).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 3, 1, true).unwrap();
        b.add_edge(NodeId(1), NodeId(0), 4, 2, true).unwrap();
        assert_eq!(b.pair_count(), 1);
        let g = b.build(false);
        assert_eq!(g.orig_cap(ArcId(0)), 5); // 3 + rev of second
        assert_eq!(g.orig_cap(ArcId(1)), 5); // 1 + 4
    }

    #[test]
    fn zero_capacity_edge_is_legal() {
        let mut b = GraphBuilder::<Cap>::new(2, 1).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 0, 0, false).unwrap();
        let g = b.build(false);
        assert_eq!(bk_solve(&g).flow_value, 0);
    }

    #[test]
    fn self_loop_rejected() {
        let mut b = GraphBuilder::<Cap>::new(2, 1).unwrap();
        assert!(matches!(
            b.add_edge(NodeId(1), NodeId(1), 1, 0, false),
            Err(BuildError::SelfLoop(_))
        ));
    }

    #[test]
    fn capacity_bound_rejected() {
        let mut b = GraphBuilder::<Cap>::new(2, 1).unwrap();
        assert_eq!(
            b.add_edge(NodeId(0), NodeId(1), Cap::huge() + 1, 0, false),
            Err(BuildError::Overflow)
        );
        // total bound as well
        let mut b = GraphBuilder::<Cap>::new(2, 1).unwrap();
        b.add_terminal(NodeId(0), Cap::huge(), 0).unwrap();
        assert_eq!(b.add_terminal(NodeId(1), 1, 0), Err(BuildError::Overflow));
    }

    #[test]
    fn packing_groups_arcs_contiguously() {
        let mut b = GraphBuilder::<Cap>::new(4, 3).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 1, 0, false).unwrap();
        b.add_edge(NodeId(2), NodeId(3), 1, 0, false).unwrap();
        b.add_edge(NodeId(0), NodeId(3), 1, 0, false).unwrap();
        let g = b.build(true);
        let arcs: Vec<ArcId> = g.out_arcs(NodeId(0)).collect();
        assert_eq!(arcs.len(), 2);
        assert_eq!(arcs[1].0, arcs[0].0 + 1);
        // insertion order preserved by the stable sort
        assert_eq!(g.head_of(arcs[0]), NodeId(1));
        assert_eq!(g.head_of(arcs[1]), NodeId(3));
    }

    #[test]
    fn rev_involution_holds_both_layouts() {
        for pack in [false, true] {
            let mut b = GraphBuilder::<Cap>::new(3, 2).unwrap();
            b.add_edge(NodeId(0), NodeId(1), 5, 2, false).unwrap();
            b.add_edge(NodeId(1), NodeId(2), 4, 0, false).unwrap();
            let g = b.build(pack);
            for a in 0..g.half_arc_count() as u32 {
                let a = ArcId(a);
                assert_eq!(g.rev(g.rev(a)), a);
                assert_eq!(g.head_of(g.rev(a)), g.tail_of(a));
            }
        }
    }

    #[test]
    fn residual_arithmetic() {
        let mut b = GraphBuilder::<Cap>::new(2, 1).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 10, 3, false).unwrap();
        let g = b.build(false);
        let a = ArcId(0);
        assert_eq!(g.residual(a), 10);
        g.push_on(a, 4);
        assert_eq!(g.residual(a), 6);
        assert_eq!(g.residual(g.rev(a)), 7); // 3 + 4 pushed back
        g.push_on(a, 6);
        assert_eq!(g.residual(a), 0);
    }

    #[test]
    fn cut_capacity_single_node() {
        let mut b = GraphBuilder::<Cap>::new(1, 0).unwrap();
        b.add_terminal(NodeId(0), 5, 3).unwrap();
        let g = b.build(false);
        assert_eq!(g.cut_capacity(&[Side::Source]), 3);
        assert_eq!(g.cut_capacity(&[Side::Sink]), 5);
    }

    #[test]
    fn cut_capacity_all_sink_is_source_cap_sum() {
        let mut b = GraphBuilder::<Cap>::new(3, 2).unwrap();
        b.add_terminal(NodeId(0), 4, 0).unwrap();
        b.add_terminal(NodeId(1), 7, 0).unwrap();
        b.add_edge(NodeId(0), NodeId(1), 2, 2, false).unwrap();
        let g = b.build(false);
        assert_eq!(g.cut_capacity(&[Side::Sink, Side::Sink, Side::Sink]), 11);
    }
}
