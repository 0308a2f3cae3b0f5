//! File formats: the DIMACS maximum-flow exchange text format and the block
//! partition file.
//!
//! DIMACS grammar (1-based node ids):
//!
//! ```text
//! c <comment>
//! p max <nodes> <arcs>
//! n <id> s
//! n <id> t
//! a <tail> <head> <capacity>
//! ```
//!
//! At ingest, arcs incident to the terminals fold into terminal capacities
//! (a direct s-t arc folds into the flow constant), duplicate arcs merge by
//! summing, and arcs that cannot lie on any minimum cut (into the source,
//! out of the sink, self loops) are dropped.
//!
//! A block partition file has one line per node: the block id of node k on
//! line k.

use std::fmt::Write as _;

use crate::graph::{BuildError, Graph, GraphBuilder, NodeId};
use crate::parallel::{BlockPartition, PartitionError};
use crate::Cap;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DimacsError {
    #[error("line {0}: malformed header, expected `p max <n> <m>`")]
    MalformedHeader(usize),
    #[error("line {0}: duplicate problem header")]
    DuplicateHeader(usize),
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("line {line}: node id {id} out of range 1..={max}")]
    IdOutOfRange { line: usize, id: i64, max: usize },
    #[error("line {0}: negative capacity")]
    NegativeCapacity(usize),
    #[error("no problem header before line {0}")]
    MissingHeader(usize),
    #[error("missing source designation (`n <id> s`)")]
    MissingSource,
    #[error("missing sink designation (`n <id> t`)")]
    MissingSink,
    #[error("source and sink are the same node {0}")]
    SourceIsSink(u32),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// A max-flow problem exactly as exchanged on disk: counts, terminal
/// designations, and the arc list with 1-based ids in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub node_count: usize,
    pub source: u32,
    pub sink: u32,
    pub arcs: Vec<(u32, u32, Cap)>,
}

impl ProblemFile {
    /// Number of non-terminal nodes after folding.
    pub fn inner_node_count(&self) -> usize {
        self.node_count - 2
    }

    /// Folds the problem into a graph builder. Returns the builder and, for
    /// each builder node, the DIMACS id it came from.
    pub fn to_builder(&self) -> Result<(GraphBuilder<Cap>, Vec<u32>), DimacsError> {
        let mut dimacs_ids = Vec::with_capacity(self.node_count.saturating_sub(2));
        let mut node_of = vec![u32::MAX; self.node_count + 1];
        for id in 1..=self.node_count as u32 {
            if id != self.source && id != self.sink {
                node_of[id as usize] = dimacs_ids.len() as u32;
                dimacs_ids.push(id);
            }
        }
        let mut b = GraphBuilder::new(dimacs_ids.len().max(1), self.arcs.len())?;
        for &(u, v, cap) in &self.arcs {
            match (u == self.source, v == self.sink) {
                (true, true) => b.add_constant(cap)?,
                (true, false) => {
                    if v != self.source {
                        b.add_terminal(NodeId(node_of[v as usize]), cap, 0)?;
                    }
                }
                (false, true) => {
                    if u != self.sink {
                        b.add_terminal(NodeId(node_of[u as usize]), 0, cap)?;
                    }
                }
                (false, false) => {
                    // arcs into the source or out of the sink never lie on a
                    // minimum cut; self loops contribute nothing either
                    if v == self.source || u == self.sink || u == v {
                        continue;
                    }
                    b.add_edge(
                        NodeId(node_of[u as usize]),
                        NodeId(node_of[v as usize]),
                        cap,
                        0,
                        true,
                    )?;
                }
            }
        }
        Ok((b, dimacs_ids))
    }
}

/// Parses DIMACS text into its structural form; `parse(write(p)) == p`.
pub fn parse_problem(text: &str) -> Result<ProblemFile, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut source = None;
    let mut sink = None;
    let mut arcs = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(DimacsError::DuplicateHeader(lineno));
                }
                if toks.len() != 4 || toks[1] != "max" {
                    return Err(DimacsError::MalformedHeader(lineno));
                }
                let n: usize = toks[2]
                    .parse()
                    .map_err(|_| DimacsError::MalformedHeader(lineno))?;
                let m: usize = toks[3]
                    .parse()
                    .map_err(|_| DimacsError::MalformedHeader(lineno))?;
                header = Some((n, m));
            }
            "n" => {
                let (n, _) = header.ok_or(DimacsError::MissingHeader(lineno))?;
                if toks.len() != 3 {
                    return Err(DimacsError::Malformed(
                        lineno,
                        "expected `n <id> s|t`".to_string(),
                    ));
                }
                let id: i64 = toks[1]
                    .parse()
                    .map_err(|_| DimacsError::Malformed(lineno, "bad node id".to_string()))?;
                if id < 1 || id as usize > n {
                    return Err(DimacsError::IdOutOfRange {
                        line: lineno,
                        id,
                        max: n,
                    });
                }
                match toks[2] {
                    "s" => source = Some(id as u32),
                    "t" => sink = Some(id as u32),
                    _ => {
                        return Err(DimacsError::Malformed(
                            lineno,
                            "terminal designation must be `s` or `t`".to_string(),
                        ))
                    }
                }
            }
            "a" => {
                let (n, _) = header.ok_or(DimacsError::MissingHeader(lineno))?;
                if toks.len() != 4 {
                    return Err(DimacsError::Malformed(
                        lineno,
                        "expected `a <tail> <head> <capacity>`".to_string(),
                    ));
                }
                let parse_id = |s: &str| -> Result<u32, DimacsError> {
                    let id: i64 = s
                        .parse()
                        .map_err(|_| DimacsError::Malformed(lineno, "bad node id".to_string()))?;
                    if id < 1 || id as usize > n {
                        return Err(DimacsError::IdOutOfRange {
                            line: lineno,
                            id,
                            max: n,
                        });
                    }
                    Ok(id as u32)
                };
                let u = parse_id(toks[1])?;
                let v = parse_id(toks[2])?;
                let cap: Cap = toks[3]
                    .parse()
                    .map_err(|_| DimacsError::Malformed(lineno, "bad capacity".to_string()))?;
                if cap < 0 {
                    return Err(DimacsError::NegativeCapacity(lineno));
                }
                arcs.push((u, v, cap));
            }
            _ => {
                return Err(DimacsError::Malformed(
                    lineno,
                    format!("unknown line kind `{}`", toks[0]),
                ))
            }
        }
    }

    let (node_count, _) = header.ok_or(DimacsError::MissingHeader(1))?;
    let source = source.ok_or(DimacsError::MissingSource)?;
    let sink = sink.ok_or(DimacsError::MissingSink)?;
    if source == sink {
        return Err(DimacsError::SourceIsSink(source));
    }
    Ok(ProblemFile {
        node_count,
        source,
        sink,
        arcs,
    })
}

/// Canonical DIMACS text for a problem.
pub fn write_problem(p: &ProblemFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p max {} {}", p.node_count, p.arcs.len());
    let _ = writeln!(out, "n {} s", p.source);
    let _ = writeln!(out, "n {} t", p.sink);
    for &(u, v, c) in &p.arcs {
        let _ = writeln!(out, "a {u} {v} {c}");
    }
    out
}

/// Parses DIMACS text straight into a folded graph builder.
pub fn parse_dimacs(text: &str) -> Result<(GraphBuilder<Cap>, Vec<u32>), DimacsError> {
    parse_problem(text)?.to_builder()
}

/// Serializes a graph back to DIMACS. The graph's nodes become ids
/// `2..=n+1` with the source at 1 and the sink at `n+2`; a direct
/// source-to-sink arc preserves any folded cut constant so round trips keep
/// the max-flow value exactly.
pub fn write_dimacs(g: &Graph<Cap>) -> String {
    let n = g.node_count();
    let mut p = ProblemFile {
        node_count: n + 2,
        source: 1,
        sink: n as u32 + 2,
        arcs: Vec::new(),
    };
    if g.cut_constant() > 0 {
        p.arcs.push((1, n as u32 + 2, g.cut_constant()));
    }
    for i in g.nodes() {
        if g.orig_src(i) > 0 {
            p.arcs.push((1, i.0 + 2, g.orig_src(i)));
        }
        if g.orig_snk(i) > 0 {
            p.arcs.push((i.0 + 2, n as u32 + 2, g.orig_snk(i)));
        }
    }
    for u in g.nodes() {
        for a in g.out_arcs(u) {
            let c = g.orig_cap(a);
            if c > 0 {
                p.arcs.push((u.0 + 2, g.head_of(a).0 + 2, c));
            }
        }
    }
    write_problem(&p)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BlockFileError {
    #[error("expected {expected} lines, found {found}")]
    WrongLineCount { expected: usize, found: usize },
    #[error("line {0}: not a block id")]
    BadLine(usize),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Reads a block partition file: line k holds the block id of node k.
pub fn read_blocks(text: &str, node_count: usize) -> Result<BlockPartition, BlockFileError> {
    let mut ids = Vec::with_capacity(node_count);
    for (k, line) in text.lines().enumerate() {
        let id: u32 = line
            .trim()
            .parse()
            .map_err(|_| BlockFileError::BadLine(k + 1))?;
        ids.push(id);
    }
    if ids.len() != node_count {
        return Err(BlockFileError::WrongLineCount {
            expected: node_count,
            found: ids.len(),
        });
    }
    Ok(BlockPartition::from_block_ids(ids)?)
}

/// One block id per line, in node order.
pub fn write_blocks(p: &BlockPartition) -> String {
    let mut out = String::new();
    for id in p.block_ids() {
        let _ = writeln!(out, "{id}");
    }
    out
}
