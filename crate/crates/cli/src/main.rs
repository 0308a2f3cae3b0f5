//! Command-line surface for the min-cut/max-flow toolkit.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use maxflow::bench::{run_bench, AlgId, BenchConfig};
use maxflow::bk::bk_solve;
use maxflow::graph::{Graph, Side};
use maxflow::hpf::{hpf_solve, HpfConfig};
use maxflow::io::{parse_problem, read_blocks, write_blocks};
use maxflow::parallel::{
    ard_solve, dd_solve, liu_sun_solve, make_overlapping, split_grid, BlockPartition,
};
use maxflow::ppr::{ppr_solve, PprSelection};
use maxflow::selector::{extract_features, DecisionTree, FeatureVector};
use maxflow::Cap;

#[derive(Parser)]
#[command(name = "maxflow", about = "Min-cut/max-flow solvers, benchmarks, and algorithm selection", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and print the max-flow value
    Solve(SolveArgs),
    /// Time one or more algorithms on a problem and emit records
    Bench(BenchArgs),
    /// Print the 31-column feature vector of a problem as CSV
    Features(FeaturesArgs),
    /// Pick an algorithm for a problem with a decision-tree file
    Select(SelectArgs),
    /// Emit a block partition file for a grid
    Split(SplitArgs),
    /// Re-emit a problem in canonical DIMACS form
    Convert(ConvertArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// bk | ppr-fifo | ppr-hi | hpf-hf | hpf-hl | hpf-lf | hpf-ll | liusun | dd | ard
    #[arg(long)]
    alg: AlgId,
    /// DIMACS max-flow problem file
    #[arg(long)]
    input: PathBuf,
    /// Block partition file (line k = block id of node k), for the
    /// block-based parallel algorithms
    #[arg(long)]
    blocks: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Reorder arcs at build time so each node's arcs are contiguous
    #[arg(long)]
    pack: bool,
    /// Also print each node's cut side (original DIMACS ids)
    #[arg(long)]
    print_cut: bool,
    #[arg(long, default_value_t = 1000)]
    dd_max_iters: usize,
    /// Initial dual step for dd (defaults to the largest terminal capacity)
    #[arg(long)]
    dd_step0: Option<Cap>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated algorithm names
    #[arg(long, value_delimiter = ',', required = true)]
    algs: Vec<AlgId>,
    /// Comma-separated thread counts for the parallel algorithms
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    pack: bool,
    #[arg(long)]
    blocks: Option<PathBuf>,
    /// csv | jsonl
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, default_value_t = 1000)]
    dd_max_iters: usize,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    input: PathBuf,
    /// Mark the graph as grid-structured in the feature vector
    #[arg(long)]
    is_grid: bool,
}

#[derive(Args)]
struct SelectArgs {
    /// Decision-tree file (`node ...` / `leaf ...` lines)
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    is_grid: bool,
}

#[derive(Args)]
struct SplitArgs {
    /// Grid extents as WxH or WxHxD; node id = x + w*(y + h*z)
    #[arg(long)]
    grid: String,
    /// Number of blocks; must be a power of two
    #[arg(long)]
    blocks: usize,
    /// Output file (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

fn load_graph(input: &PathBuf, pack: bool) -> Result<(Graph<Cap>, Vec<u32>)> {
    let text = fs::read_to_string(input)
        .with_context(|| format!("cannot read {}", input.display()))?;
    let problem = parse_problem(&text)?;
    let (builder, ids) = problem.to_builder()?;
    Ok((builder.build(pack), ids))
}

fn load_blocks(path: &Option<PathBuf>, node_count: usize) -> Result<BlockPartition> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            Ok(read_blocks(&text, node_count)?)
        }
        None => Ok(BlockPartition::single(node_count)),
    }
}

fn parse_grid(spec: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<usize> = spec
        .split('x')
        .map(|p| p.parse().context("grid extents must be integers"))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [w] => Ok((*w, 1, 1)),
        [w, h] => Ok((*w, *h, 1)),
        [w, h, d] => Ok((*w, *h, *d)),
        _ => bail!("grid must be W, WxH, or WxHxD"),
    }
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let (g, ids) = load_graph(&a.input, a.pack)?;
    let cut = match a.alg {
        AlgId::Bk => bk_solve(&g),
        AlgId::PprFifo => ppr_solve(&g, PprSelection::Fifo, g.node_count()),
        AlgId::PprHighest => ppr_solve(&g, PprSelection::HighestLabel, g.node_count()),
        AlgId::HpfHighestFifo => hpf_solve(&g, HpfConfig::HIGHEST_FIFO),
        AlgId::HpfHighestLifo => hpf_solve(&g, HpfConfig::HIGHEST_LIFO),
        AlgId::HpfLowestFifo => hpf_solve(&g, HpfConfig::LOWEST_FIFO),
        AlgId::HpfLowestLifo => hpf_solve(&g, HpfConfig::LOWEST_LIFO),
        AlgId::LiuSun => {
            let p = load_blocks(&a.blocks, g.node_count())?;
            liu_sun_solve(&g, &p, a.threads)
        }
        AlgId::Ard => {
            let p = load_blocks(&a.blocks, g.node_count())?;
            ard_solve(&g, &p, a.threads)
        }
        AlgId::Dd => {
            let p = load_blocks(&a.blocks, g.node_count())?;
            let op = make_overlapping(&g, &p);
            match dd_solve(&g, &op, a.threads, a.dd_max_iters, a.dd_step0) {
                Ok((cut, stats)) => {
                    eprintln!("converged after {} iterations", stats.iterations);
                    cut
                }
                Err(nc) => bail!("{nc}"),
            }
        }
    };
    println!("{}", cut.flow_value);
    if a.print_cut {
        for (k, id) in ids.iter().enumerate() {
            let side = match cut.side[k] {
                Side::Source => "s",
                Side::Sink => "t",
            };
            println!("{id} {side}");
        }
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let text = fs::read_to_string(&a.input)
        .with_context(|| format!("cannot read {}", a.input.display()))?;
    let problem = parse_problem(&text)?;
    let blocks = match &a.blocks {
        Some(p) => {
            let btext = fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            Some(read_blocks(&btext, problem.inner_node_count())?)
        }
        None => None,
    };
    let dataset = a
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".to_string());
    let cfg = BenchConfig {
        dataset,
        threads: &a.threads,
        repeats: a.repeats,
        pack: a.pack,
        blocks: blocks.as_ref(),
        dd_max_iters: a.dd_max_iters,
    };
    let records = run_bench(&problem, &a.algs, &cfg)?;
    match a.format.as_str() {
        "csv" => {
            println!("{}", maxflow::bench::BenchRecord::csv_header());
            for r in &records {
                println!("{}", r.csv_row());
            }
        }
        "jsonl" => {
            for r in &records {
                println!("{}", r.json_line());
            }
        }
        other => bail!("unknown format `{other}` (expected csv or jsonl)"),
    }
    Ok(())
}

fn cmd_features(a: FeaturesArgs) -> Result<()> {
    let (g, _) = load_graph(&a.input, false)?;
    let f = extract_features(&g, a.is_grid);
    println!("{}", FeatureVector::csv_header());
    println!("{}", f.csv_row());
    Ok(())
}

fn cmd_select(a: SelectArgs) -> Result<()> {
    let text = fs::read_to_string(&a.tree)
        .with_context(|| format!("cannot read {}", a.tree.display()))?;
    let tree = DecisionTree::parse_text(&text)?;
    let (g, _) = load_graph(&a.input, false)?;
    let f = extract_features(&g, a.is_grid);
    println!("{}", tree.predict(&f)?);
    Ok(())
}

fn cmd_split(a: SplitArgs) -> Result<()> {
    let dims = parse_grid(&a.grid)?;
    let p = split_grid(dims, a.blocks)?;
    let text = write_blocks(&p);
    match a.output {
        Some(path) => fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_convert(a: ConvertArgs) -> Result<()> {
    let text = fs::read_to_string(&a.input)
        .with_context(|| format!("cannot read {}", a.input.display()))?;
    let problem = parse_problem(&text)?;
    // canonical form: fold, merge duplicates, and re-emit
    let (builder, _) = problem.to_builder()?;
    let g = builder.build(false);
    fs::write(&a.output, maxflow::io::write_dimacs(&g))
        .with_context(|| format!("cannot write {}", a.output.display()))?;
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Features(a) => cmd_features(a),
        Command::Select(a) => cmd_select(a),
        Command::Split(a) => cmd_split(a),
        Command::Convert(a) => cmd_convert(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
