//! Timing harness.
//!
//! Measures build time (graph construction from in-memory lists, including
//! any packing) and solve time (minimum-cut computation only) separately,
//! reporting the minimum of each over a number of repeats. Every run
//! cross-checks the flow values of all algorithms; a disagreement is a
//! correctness failure, never swallowed.

use std::time::Instant;

use serde::Serialize;

use crate::bk::bk_solve;
use crate::graph::{CutResult, Graph};
use crate::hpf::{hpf_solve, HpfConfig};
use crate::io::{DimacsError, ProblemFile};
use crate::mem::{mem_footprint, MemModel};
use crate::parallel::{ard_solve, dd_solve, liu_sun_solve, make_overlapping, BlockPartition};
use crate::ppr::{ppr_solve, PprSelection};
use crate::Cap;

/// Benchmarkable algorithm configurations and their CLI names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgId {
    Bk,
    PprFifo,
    PprHighest,
    HpfHighestFifo,
    HpfHighestLifo,
    HpfLowestFifo,
    HpfLowestLifo,
    LiuSun,
    Dd,
    Ard,
}

impl AlgId {
    pub const ALL: [AlgId; 10] = [
        AlgId::Bk,
        AlgId::PprFifo,
        AlgId::PprHighest,
        AlgId::HpfHighestFifo,
        AlgId::HpfHighestLifo,
        AlgId::HpfLowestFifo,
        AlgId::HpfLowestLifo,
        AlgId::LiuSun,
        AlgId::Dd,
        AlgId::Ard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgId::Bk => "bk",
            AlgId::PprFifo => "ppr-fifo",
            AlgId::PprHighest => "ppr-hi",
            AlgId::HpfHighestFifo => "hpf-hf",
            AlgId::HpfHighestLifo => "hpf-hl",
            AlgId::HpfLowestFifo => "hpf-lf",
            AlgId::HpfLowestLifo => "hpf-ll",
            AlgId::LiuSun => "liusun",
            AlgId::Dd => "dd",
            AlgId::Ard => "ard",
        }
    }

    pub fn is_parallel(self) -> bool {
        matches!(self, AlgId::LiuSun | AlgId::Dd | AlgId::Ard)
    }

    /// Reference implementation whose footprint formula describes this
    /// algorithm (the BK solver maps to the reordered variant when packed).
    pub fn mem_model(self, packed: bool) -> MemModel {
        match self {
            AlgId::Bk => {
                if packed {
                    MemModel::MbkR
                } else {
                    MemModel::Mbk
                }
            }
            AlgId::PprFifo | AlgId::PprHighest => MemModel::HiPr,
            AlgId::HpfHighestFifo
            | AlgId::HpfHighestLifo
            | AlgId::HpfLowestFifo
            | AlgId::HpfLowestLifo => MemModel::Hpf,
            AlgId::LiuSun => MemModel::LiuSun,
            AlgId::Dd => MemModel::StrandmarkKahl,
            AlgId::Ard => MemModel::PArd,
        }
    }
}

impl std::fmt::Display for AlgId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown algorithm `{0}`")]
pub struct UnknownAlg(String);

impl std::str::FromStr for AlgId {
    type Err = UnknownAlg;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlg(s.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("flow values disagree: {a_name} found {a_flow}, {b_name} found {b_flow}")]
    ValueMismatch {
        a_name: String,
        a_flow: Cap,
        b_name: String,
        b_flow: Cap,
    },
    #[error("`{alg}` did not produce identical flows across repeats ({first} vs {second})")]
    UnstableFlow { alg: String, first: Cap, second: Cap },
    #[error("dual decomposition did not converge within {0} iterations")]
    DdNonConvergence(usize),
    #[error(transparent)]
    Dimacs(#[from] DimacsError),
}

/// One measured (algorithm, thread count) configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub algorithm: String,
    pub threads: usize,
    /// minimum build time over the repeats, nanoseconds
    pub build_ns: u128,
    /// minimum solve time over the repeats, nanoseconds
    pub solve_ns: u128,
    pub flow_value: Cap,
    pub repeats: usize,
    /// reference-model footprint from the published formulas
    pub model_bytes: u64,
    /// bytes actually held by this implementation's graph buffers
    pub actual_graph_bytes: u64,
}

impl BenchRecord {
    pub fn csv_header() -> &'static str {
        "dataset,algorithm,threads,build_ns,solve_ns,flow_value,repeats,model_bytes,actual_graph_bytes"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.algorithm,
            self.threads,
            self.build_ns,
            self.solve_ns,
            self.flow_value,
            self.repeats,
            self.model_bytes,
            self.actual_graph_bytes
        )
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// A named solver under benchmark; the extension point for measuring custom
/// configurations against the built-in ones.
pub struct BenchEntry {
    pub name: String,
    pub parallel: bool,
    pub model: Option<MemModel>,
    #[allow(clippy::type_complexity)]
    pub solver: Box<dyn Fn(&Graph<Cap>, usize) -> Result<CutResult<Cap>, BenchError> + Sync>,
}

/// Harness options beyond the algorithm list.
pub struct BenchConfig<'a> {
    pub dataset: String,
    pub threads: &'a [usize],
    pub repeats: usize,
    pub pack: bool,
    pub blocks: Option<&'a BlockPartition>,
    pub dd_max_iters: usize,
}

impl Default for BenchConfig<'_> {
    fn default() -> Self {
        BenchConfig {
            dataset: "problem".to_string(),
            threads: &[1],
            repeats: 3,
            pack: false,
            blocks: None,
            dd_max_iters: 1000,
        }
    }
}

/// Builds the standard entry for one algorithm id.
pub fn standard_entry(alg: AlgId, cfg: &BenchConfig<'_>) -> BenchEntry {
    let blocks = cfg.blocks.cloned();
    let dd_iters = cfg.dd_max_iters;
    let pack = cfg.pack;
    let solver: Box<dyn Fn(&Graph<Cap>, usize) -> Result<CutResult<Cap>, BenchError> + Sync> =
        match alg {
            AlgId::Bk => Box::new(|g, _| Ok(bk_solve(g))),
            AlgId::PprFifo => Box::new(|g, _| Ok(ppr_solve(g, PprSelection::Fifo, g.node_count()))),
            AlgId::PprHighest => {
                Box::new(|g, _| Ok(ppr_solve(g, PprSelection::HighestLabel, g.node_count())))
            }
            AlgId::HpfHighestFifo => Box::new(|g, _| Ok(hpf_solve(g, HpfConfig::HIGHEST_FIFO))),
            AlgId::HpfHighestLifo => Box::new(|g, _| Ok(hpf_solve(g, HpfConfig::HIGHEST_LIFO))),
            AlgId::HpfLowestFifo => Box::new(|g, _| Ok(hpf_solve(g, HpfConfig::LOWEST_FIFO))),
            AlgId::HpfLowestLifo => Box::new(|g, _| Ok(hpf_solve(g, HpfConfig::LOWEST_LIFO))),
            AlgId::LiuSun => Box::new(move |g, threads| {
                let p = blocks
                    .clone()
                    .unwrap_or_else(|| BlockPartition::single(g.node_count()));
                Ok(liu_sun_solve(g, &p, threads))
            }),
            AlgId::Ard => {
                let blocks = cfg.blocks.cloned();
                Box::new(move |g, threads| {
                    let p = blocks
                        .clone()
                        .unwrap_or_else(|| BlockPartition::single(g.node_count()));
                    Ok(ard_solve(g, &p, threads))
                })
            }
            AlgId::Dd => {
                let blocks = cfg.blocks.cloned();
                Box::new(move |g, threads| {
                    let p = blocks
                        .clone()
                        .unwrap_or_else(|| BlockPartition::single(g.node_count()));
                    let op = make_overlapping(g, &p);
                    match dd_solve(g, &op, threads, dd_iters, None) {
                        Ok((cut, _)) => Ok(cut),
                        Err(nc) => Err(BenchError::DdNonConvergence(nc.iterations)),
                    }
                })
            }
        };
    BenchEntry {
        name: alg.name().to_string(),
        parallel: alg.is_parallel(),
        model: Some(alg.mem_model(pack)),
        solver,
    }
}

/// Runs the harness over custom entries. The problem's node and arc lists
/// are already materialized in memory; the build timer covers graph
/// construction (and packing), the solve timer the min-cut computation only.
pub fn run_bench_custom(
    problem: &ProblemFile,
    entries: &[BenchEntry],
    cfg: &BenchConfig<'_>,
) -> Result<Vec<BenchRecord>, BenchError> {
    let repeats = cfg.repeats.max(1);
    let mut records = Vec::new();
    let mut reference: Option<(String, Cap)> = None;

    for entry in entries {
        let thread_counts: Vec<usize> = if entry.parallel {
            cfg.threads.to_vec()
        } else {
            vec![1]
        };
        for &threads in &thread_counts {
            let mut best_build = u128::MAX;
            let mut best_solve = u128::MAX;
            let mut flow: Option<Cap> = None;
            let mut graph_bytes = 0u64;
            let mut model_bytes = 0u64;
            for _ in 0..repeats {
                let t0 = Instant::now();
                let (builder, _) = problem.to_builder()?;
                let g = builder.build(cfg.pack);
                let build_ns = t0.elapsed().as_nanos();

                let t0 = Instant::now();
                let cut = (entry.solver)(&g, threads)?;
                let solve_ns = t0.elapsed().as_nanos();

                best_build = best_build.min(build_ns);
                best_solve = best_solve.min(solve_ns);
                graph_bytes = g.memory_bytes() as u64;
                model_bytes = entry.model.map_or(0, |m| {
                    mem_footprint(
                        m,
                        g.node_count() as u64,
                        g.terminal_arc_count() as u64,
                        g.pair_count() as u64,
                    )
                });
                match flow {
                    None => flow = Some(cut.flow_value),
                    Some(prev) if prev != cut.flow_value => {
                        return Err(BenchError::UnstableFlow {
                            alg: entry.name.clone(),
                            first: prev,
                            second: cut.flow_value,
                        })
                    }
                    _ => {}
                }
            }
            let flow = flow.expect("repeats >= 1");
            match &reference {
                None => reference = Some((entry.name.clone(), flow)),
                Some((ref_name, ref_flow)) => {
                    if *ref_flow != flow {
                        return Err(BenchError::ValueMismatch {
                            a_name: ref_name.clone(),
                            a_flow: *ref_flow,
                            b_name: entry.name.clone(),
                            b_flow: flow,
                        });
                    }
                }
            }
            records.push(BenchRecord {
                dataset: cfg.dataset.clone(),
                algorithm: entry.name.clone(),
                threads,
                build_ns: best_build,
                solve_ns: best_solve,
                flow_value: flow,
                repeats,
                model_bytes,
                actual_graph_bytes: graph_bytes,
            });
        }
    }
    Ok(records)
}

/// Runs the harness for the named algorithms with the standard solvers.
pub fn run_bench(
    problem: &ProblemFile,
    algs: &[AlgId],
    cfg: &BenchConfig<'_>,
) -> Result<Vec<BenchRecord>, BenchError> {
    let entries: Vec<BenchEntry> = algs.iter().map(|&a| standard_entry(a, cfg)).collect();
    run_bench_custom(problem, &entries, cfg)
}
