//! Shared test utilities: raw instance generators and brute-force oracles.
//!
//! The oracles work on raw capacity lists, independent of the graph
//! representation and of every solver code path they are used to check.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use maxflow::graph::{Graph, GraphBuilder, NodeId, Side};
use maxflow::Cap;

/// A max-flow instance as plain lists: per-node terminal capacities and
/// directed neighbor capacities in half-arc pairs.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub n: usize,
    pub terminals: Vec<(Cap, Cap)>,           // (c_si, c_it)
    pub arcs: Vec<(u32, u32, Cap, Cap)>,      // (u, v, cap, rev_cap)
}

impl RawInstance {
    pub fn random(rng: &mut StdRng, max_n: usize, max_arcs: usize, max_cap: Cap) -> Self {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(0..=max_arcs);
        let terminals = (0..n)
            .map(|_| (rng.gen_range(0..=max_cap), rng.gen_range(0..=max_cap)))
            .collect();
        let mut arcs = Vec::with_capacity(m);
        if n >= 2 {
            for _ in 0..m {
                let u = rng.gen_range(0..n as u32);
                let mut v = rng.gen_range(0..n as u32);
                while v == u {
                    v = rng.gen_range(0..n as u32);
                }
                arcs.push((u, v, rng.gen_range(0..=max_cap), rng.gen_range(0..=max_cap)));
            }
        }
        RawInstance { n, terminals, arcs }
    }

    pub fn scaled(&self, k: Cap) -> Self {
        RawInstance {
            n: self.n,
            terminals: self.terminals.iter().map(|&(s, t)| (s * k, t * k)).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|&(u, v, c, r)| (u, v, c * k, r * k))
                .collect(),
        }
    }

    pub fn builder(&self, merge: bool) -> GraphBuilder<Cap> {
        let mut b = GraphBuilder::new(self.n, self.arcs.len()).unwrap();
        for (i, &(s, t)) in self.terminals.iter().enumerate() {
            b.add_terminal(NodeId(i as u32), s, t).unwrap();
        }
        for &(u, v, c, r) in &self.arcs {
            b.add_edge(NodeId(u), NodeId(v), c, r, merge).unwrap();
        }
        b
    }

    pub fn graph(&self, pack: bool) -> Graph<Cap> {
        self.builder(false).build(pack)
    }

    /// Capacity of the cut whose source set is given by `mask` bit i.
    pub fn cut_of_mask(&self, mask: u64) -> Cap {
        let in_s = |i: u32| mask >> i & 1 == 1;
        let mut total = 0;
        for (i, &(s, t)) in self.terminals.iter().enumerate() {
            if in_s(i as u32) {
                total += t;
            } else {
                total += s;
            }
        }
        for &(u, v, c, r) in &self.arcs {
            if in_s(u) && !in_s(v) {
                total += c;
            }
            if in_s(v) && !in_s(u) {
                total += r;
            }
        }
        total
    }

    /// Minimum cut value by enumerating all 2^n source sets.
    pub fn brute_force_min_cut(&self) -> Cap {
        assert!(self.n <= 20, "enumeration oracle needs small n");
        (0..1u64 << self.n)
            .map(|mask| self.cut_of_mask(mask))
            .min()
            .unwrap()
    }

    pub fn side_mask(side: &[Side]) -> u64 {
        side.iter()
            .enumerate()
            .filter(|(_, s)| **s == Side::Source)
            .map(|(i, _)| 1u64 << i)
            .sum()
    }
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
