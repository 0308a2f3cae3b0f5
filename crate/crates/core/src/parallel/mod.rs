//! Block partitioning and the three block-based parallel solvers.
//!
//! Blocks are node sets processed by one worker each. The three schemes are
//! adaptive bottom-up merging ([`liu_sun_solve`]), dual decomposition over
//! overlapping blocks ([`dd_solve`]), and augmenting-path region discharge
//! ([`ard_solve`]). All of them return the exact serial max-flow value;
//! parallelism never changes the result.

use std::collections::BTreeSet;

use crate::graph::{Graph, NodeId};
use crate::Flow;

mod dual_decomp;
mod liu_sun;
mod region_discharge;

pub use dual_decomp::{dd_solve, DdStats, NonConvergence};
pub use liu_sun::{liu_sun_solve, liu_sun_solve_with_stats, LiuSunStats};
pub use region_discharge::{ard_solve, ard_solve_with_stats, ArdStats};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("block count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("partition covers {0} nodes but the graph has {1}")]
    WrongNodeCount(usize, usize),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("grid of {0} nodes cannot be split into {1} blocks")]
    TooManyBlocks(usize, usize),
}

/// Disjoint node-to-block assignment.
#[derive(Debug, Clone)]
pub struct BlockPartition {
    block_of: Vec<u32>,
    block_count: usize,
}

impl BlockPartition {
    /// Builds a partition from raw ids, compacting them to `0..k`.
    /// Every block must be nonempty after compaction.
    pub fn from_block_ids(ids: Vec<u32>) -> Result<Self, PartitionError> {
        let distinct: BTreeSet<u32> = ids.iter().copied().collect();
        let remap: Vec<u32> = distinct.into_iter().collect();
        let block_of: Vec<u32> = ids
            .iter()
            .map(|i| remap.binary_search(i).unwrap() as u32)
            .collect();
        let block_count = remap.len();
        for b in 0..block_count {
            if !block_of.iter().any(|&x| x as usize == b) {
                return Err(PartitionError::EmptyBlock(b));
            }
        }
        Ok(BlockPartition {
            block_of,
            block_count,
        })
    }

    /// One block holding every node.
    pub fn single(node_count: usize) -> Self {
        BlockPartition {
            block_of: vec![0; node_count],
            block_count: 1,
        }
    }

    pub fn block_of(&self, i: NodeId) -> u32 {
        self.block_of[i.0 as usize]
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn node_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_ids(&self) -> &[u32] {
        &self.block_of
    }

    /// Node lists per block, each sorted by id.
    pub fn block_nodes(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.block_count];
        for (i, &b) in self.block_of.iter().enumerate() {
            out[b as usize].push(NodeId(i as u32));
        }
        out
    }

    pub fn check_matches<F: Flow>(&self, g: &Graph<F>) -> Result<(), PartitionError> {
        if self.block_of.len() != g.node_count() {
            return Err(PartitionError::WrongNodeCount(
                self.block_of.len(),
                g.node_count(),
            ));
        }
        Ok(())
    }
}

/// Splits a `w x h x d` grid (node id = x + w*(y + h*z)) into `k` blocks by
/// recursively halving along the longest axis. `k` must be a power of two.
pub fn split_grid(dims: (usize, usize, usize), k: usize) -> Result<BlockPartition, PartitionError> {
    let (w, h, d) = dims;
    let n = w * h * d;
    if !k.is_power_of_two() {
        return Err(PartitionError::NotPowerOfTwo(k));
    }
    if k == 0 || k > n {
        return Err(PartitionError::TooManyBlocks(n, k));
    }
    let mut block_of = vec![0u32; n];
    let mut next_id = 0u32;
    // (x range, y range, z range, blocks to produce)
    let mut stack = vec![((0, w), (0, h), (0, d), k)];
    while let Some(((x0, x1), (y0, y1), (z0, z1), kk)) = stack.pop() {
        if kk == 1 {
            for z in z0..z1 {
                for y in y0..y1 {
                    for x in x0..x1 {
                        block_of[x + w * (y + h * z)] = next_id;
                    }
                }
            }
            next_id += 1;
            continue;
        }
        let (ex, ey, ez) = (x1 - x0, y1 - y0, z1 - z0);
        // longest axis wins; ties go to the later axis
        if ez >= ex && ez >= ey {
            let mid = z0 + ez / 2;
            stack.push(((x0, x1), (y0, y1), (mid, z1), kk / 2));
            stack.push(((x0, x1), (y0, y1), (z0, mid), kk / 2));
        } else if ey >= ex {
            let mid = y0 + ey / 2;
            stack.push(((x0, x1), (mid, y1), (z0, z1), kk / 2));
            stack.push(((x0, x1), (y0, mid), (z0, z1), kk / 2));
        } else {
            let mid = x0 + ex / 2;
            stack.push(((mid, x1), (y0, y1), (z0, z1), kk / 2));
            stack.push(((x0, mid), (y0, y1), (z0, z1), kk / 2));
        }
    }
    BlockPartition::from_block_ids(block_of)
}

/// Boundary of a block: nodes outside it that some block node points to
/// (terminals are implicit and never appear).
pub fn boundary_set<F: Flow>(g: &Graph<F>, p: &BlockPartition, block: u32) -> Vec<NodeId> {
    let mut seen = vec![false; g.node_count()];
    let mut out = Vec::new();
    for u in g.nodes() {
        if p.block_of(u) != block {
            continue;
        }
        for a in g.out_arcs(u) {
            let v = g.head_of(a);
            if p.block_of(v) != block && !seen[v.0 as usize] {
                seen[v.0 as usize] = true;
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

/// Node-to-block map where blocks may overlap; overlapping nodes are
/// duplicated into every block that contains them.
#[derive(Debug, Clone)]
pub struct OverlapPartition {
    /// sorted node list per block: the original block plus its boundary
    pub blocks: Vec<Vec<NodeId>>,
    /// for every node, the blocks containing it (sorted)
    pub containing: Vec<Vec<u32>>,
}

impl OverlapPartition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Nodes present in more than one block.
    pub fn duplicated_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.containing
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .map(|(i, _)| NodeId(i as u32))
    }
}

/// Expands each block by its boundary so that a node adjacent to two blocks
/// belongs to both.
pub fn make_overlapping<F: Flow>(g: &Graph<F>, p: &BlockPartition) -> OverlapPartition {
    let mut blocks = p.block_nodes();
    for (b, nodes) in blocks.iter_mut().enumerate() {
        nodes.extend(boundary_set(g, p, b as u32));
        nodes.sort();
        nodes.dedup();
    }
    let mut containing = vec![Vec::new(); g.node_count()];
    for (b, nodes) in blocks.iter().enumerate() {
        for v in nodes {
            containing[v.0 as usize].push(b as u32);
        }
    }
    OverlapPartition { blocks, containing }
}

/// Splits `total` into `parts` integer shares differing by at most one;
/// share `idx` of the remainder-balanced division.
pub(crate) fn balanced_share<F: Flow>(total: F, parts: usize, idx: usize) -> F {
    let p = F::from(parts).unwrap();
    let neg = total < F::zero();
    let mag = total.abs();
    let base = mag / p;
    let rem = (mag % p).to_usize().unwrap();
    let share = if idx < rem { base + F::one() } else { base };
    if neg {
        -share
    } else {
        share
    }
}
