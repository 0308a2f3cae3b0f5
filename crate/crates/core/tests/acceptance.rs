//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Everything is property- and oracle-based at desk scale: exact value
//! equality against cut enumeration, exact duality, exact parallel/serial
//! agreement, and the published footprint formulas checked against
//! hand-computed values.

mod common;

use common::{seeded, RawInstance};
use rand::Rng;

use maxflow::bench::{run_bench_custom, standard_entry, AlgId, BenchConfig, BenchEntry, BenchError};
use maxflow::bk::{bk_solve, BkSolver};
use maxflow::energy::{
    build_qpbo, build_submodular, extract_qpbo_labels, EnergyProblem, QpboLabel,
};
use maxflow::graph::{Graph, NodeId, Side};
use maxflow::hpf::{hpf_solve, HpfConfig};
use maxflow::io::{parse_dimacs, parse_problem, write_dimacs};
use maxflow::mem::{mem_footprint, MemModel};
use maxflow::parallel::{
    ard_solve_with_stats, dd_solve, liu_sun_solve, make_overlapping, split_grid, BlockPartition,
};
use maxflow::ppr::{ppr_solve, PprSelection};
use maxflow::selector::{
    extract_features, mean_rp, rp_score, train_tree, FeatureVector, RpSample, TrainOptions,
};
use maxflow::Cap;

/// Every serial solver configuration under test.
fn serial_solvers() -> Vec<(&'static str, Box<dyn Fn(&Graph<Cap>) -> maxflow::graph::CutResult<Cap>>)>
{
    let mut v: Vec<(&'static str, Box<dyn Fn(&Graph<Cap>) -> maxflow::graph::CutResult<Cap>>)> =
        vec![
            ("bk", Box::new(|g| bk_solve(g))),
            (
                "ppr-fifo",
                Box::new(|g| ppr_solve(g, PprSelection::Fifo, g.node_count())),
            ),
            (
                "ppr-hi",
                Box::new(|g| ppr_solve(g, PprSelection::HighestLabel, g.node_count())),
            ),
        ];
    for (name, cfg) in [
        ("hpf-hf", HpfConfig::HIGHEST_FIFO),
        ("hpf-hl", HpfConfig::HIGHEST_LIFO),
        ("hpf-lf", HpfConfig::LOWEST_FIFO),
        ("hpf-ll", HpfConfig::LOWEST_LIFO),
    ] {
        v.push((name, Box::new(move |g| hpf_solve(g, cfg))));
    }
    v
}

fn random_grid_mrf(side: usize, seed: u64) -> EnergyProblem<Cap> {
    let mut rng = seeded(seed);
    let mut e = EnergyProblem::new(side * side * side);
    let id = |x: usize, y: usize, z: usize| (x + side * (y + side * z)) as u32;
    for z in 0..side {
        for y in 0..side {
            for x in 0..side {
                e.add_unary(id(x, y, z), rng.gen_range(0..40), rng.gen_range(0..40))
                    .unwrap();
                let mut link = |a: u32, b: u32, rng: &mut rand::rngs::StdRng| {
                    let beta: Cap = rng.gen_range(1..8);
                    e.add_pairwise(a, b, [0, beta, beta, 0]).unwrap();
                };
                if x + 1 < side {
                    link(id(x, y, z), id(x + 1, y, z), &mut rng);
                }
                if y + 1 < side {
                    link(id(x, y, z), id(x, y + 1, z), &mut rng);
                }
                if z + 1 < side {
                    link(id(x, y, z), id(x, y, z + 1), &mut rng);
                }
            }
        }
    }
    e
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = std::time::Instant::now();
    let mut rng = seeded(101);
    let solvers = serial_solvers();
    for round in 0..500 {
        let inst = RawInstance::random(&mut rng, 10, 30, 10);
        let expect = inst.brute_force_min_cut();
        for (name, solve) in &solvers {
            let g = inst.graph(round % 2 == 0);
            let cut = solve(&g);
            assert_eq!(cut.flow_value, expect, "round {round} solver {name}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}, budget is 30 s");
    println!("criterion 1 (oracle equivalence, 500 instances x 7 solvers): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_duality() {
    let mut rng = seeded(102);
    let solvers = serial_solvers();
    for round in 0..200 {
        let inst = RawInstance::random(&mut rng, 10, 30, 10);
        for (name, solve) in &solvers {
            let g = inst.graph(round % 2 == 1);
            let cut = solve(&g);
            assert_eq!(
                g.cut_capacity(&cut.side),
                cut.flow_value,
                "round {round} solver {name}"
            );
        }
        // parallel solvers too
        let g = inst.graph(false);
        let p = BlockPartition::from_block_ids(
            (0..inst.n).map(|i| (i % 2) as u32).collect(),
        )
        .unwrap();
        let cut = liu_sun_solve(&g, &p, 2);
        assert_eq!(g.cut_capacity(&cut.side), cut.flow_value, "liusun {round}");
        let g = inst.graph(false);
        let (cut, _) = ard_solve_with_stats(&g, &p, 2);
        assert_eq!(g.cut_capacity(&cut.side), cut.flow_value, "ard {round}");
    }
    println!("criterion 2 (duality, every solver): PASS");
}

#[test]
fn criterion_3_parallel_equals_serial() {
    let start = std::time::Instant::now();
    let mut rng = seeded(103);

    // 200 random instances
    let mut dd_converged = 0usize;
    for round in 0..200 {
        let inst = RawInstance::random(&mut rng, 50, 150, 10);
        let serial = bk_solve(&inst.graph(false)).flow_value;
        let k = rng.gen_range(2..=8usize.min(inst.n).max(2));
        let ids: Vec<u32> = (0..inst.n)
            .map(|i| if i < k { i as u32 } else { rng.gen_range(0..k as u32) })
            .collect();
        let p = BlockPartition::from_block_ids(ids).unwrap();
        let threads = rng.gen_range(1..=8);

        let g = inst.graph(false);
        assert_eq!(
            liu_sun_solve(&g, &p, threads).flow_value,
            serial,
            "liusun round {round}"
        );
        let g = inst.graph(false);
        let (cut, stats) = ard_solve_with_stats(&g, &p, threads);
        assert_eq!(cut.flow_value, serial, "ard round {round}");
        let nb = stats.boundary_nodes;
        assert!(stats.sweeps <= 2 * nb * nb + 1);
        let g = inst.graph(false);
        let op = make_overlapping(&g, &p);
        if let Ok((cut, _)) = dd_solve(&g, &op, threads.min(4), 300, None) {
            dd_converged += 1;
            assert_eq!(cut.flow_value, serial, "dd round {round}");
        }
    }
    assert!(dd_converged > 50, "dd converged on only {dd_converged}/200");

    // 32^3 six-connected grid MRF built from energies
    let e = random_grid_mrf(32, 1007);
    let (g, _) = build_submodular(&e).unwrap();
    let serial = {
        let mut c = g.clone();
        c.reset_residuals();
        bk_solve(&c).flow_value
    };
    let p64 = split_grid((32, 32, 32), 64).unwrap();
    let cut = {
        let mut c = g.clone();
        c.reset_residuals();
        liu_sun_solve(&c, &p64, 4)
    };
    assert_eq!(cut.flow_value, serial, "liusun on 32^3 grid, 64 blocks");
    let p8 = split_grid((32, 32, 32), 8).unwrap();
    let (cut, stats) = {
        let mut c = g.clone();
        c.reset_residuals();
        ard_solve_with_stats(&c, &p8, 4)
    };
    assert_eq!(cut.flow_value, serial, "ard on 32^3 grid, 8 blocks");
    assert!(stats.sweeps <= 2 * stats.boundary_nodes * stats.boundary_nodes + 1);
    // dual decomposition: convergence is not guaranteed; converged runs
    // must match, non-convergence is reported and excluded
    let p4 = split_grid((32, 32, 32), 4).unwrap();
    let op = make_overlapping(&g, &p4);
    let dd_grid_note = match {
        let mut c = g.clone();
        c.reset_residuals();
        dd_solve(&c, &op, 4, 600, None)
    } {
        Ok((cut, st)) => {
            assert_eq!(cut.flow_value, serial, "dd on 32^3 grid");
            format!("dd converged in {} iterations", st.iterations)
        }
        Err(nc) => format!("dd non-convergent after {} iterations (excluded)", nc.iterations),
    };
    // smaller grids where dual decomposition does converge: at least one
    // instance must converge, and converged runs must match the serial value
    let mut dd_small_converged = false;
    for seed in [7u64, 1008, 2020, 3033] {
        let e8 = random_grid_mrf(8, seed);
        let (g8, _) = build_submodular(&e8).unwrap();
        let serial8 = {
            let mut c = g8.clone();
            c.reset_residuals();
            bk_solve(&c).flow_value
        };
        let op8 = make_overlapping(&g8, &split_grid((8, 8, 8), 2).unwrap());
        if let Ok((cut8, _)) = dd_solve(&g8, &op8, 2, 1000, None) {
            assert_eq!(cut8.flow_value, serial8, "dd on 8^3 grid, seed {seed}");
            dd_small_converged = true;
            break;
        }
    }
    assert!(dd_small_converged, "dd converged on no 8^3 grid instance");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}, budget is 2 min");
    println!(
        "criterion 3 (parallel = serial; dd converged on {dd_converged}/200 random; {dd_grid_note}): PASS in {elapsed:?}"
    );
}

/// Random energy problem; `submodular` forces every pairwise table to
/// satisfy the submodularity inequality.
fn random_energy(rng: &mut rand::rngs::StdRng, max_vars: usize, submodular: bool) -> EnergyProblem<Cap> {
    let n = rng.gen_range(1..=max_vars);
    let mut e = EnergyProblem::new(n);
    for i in 0..n as u32 {
        e.add_unary(i, rng.gen_range(-10..=10), rng.gen_range(-10..=10))
            .unwrap();
    }
    if n >= 2 {
        let terms = rng.gen_range(0..=2 * n);
        for _ in 0..terms {
            let i = rng.gen_range(0..n as u32);
            let mut j = rng.gen_range(0..n as u32);
            while j == i {
                j = rng.gen_range(0..n as u32);
            }
            let mut t: [Cap; 4] = std::array::from_fn(|_| rng.gen_range(-10..=10));
            if submodular && t[0] + t[3] > t[1] + t[2] {
                // raise the disagreement energies until the table qualifies
                t[1] += t[0] + t[3] - t[1] - t[2];
            }
            let _ = e.add_pairwise(i, j, t); // duplicate pairs skipped
        }
    }
    e
}

fn exhaustive_optima(e: &EnergyProblem<Cap>) -> (Cap, Vec<Vec<bool>>) {
    let n = e.var_count();
    let mut best = Cap::MAX;
    let mut argmins = Vec::new();
    for mask in 0..1u64 << n {
        let lab: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
        let v = e.energy_of(&lab);
        if v < best {
            best = v;
            argmins = vec![lab];
        } else if v == best {
            argmins.push(lab);
        }
    }
    (best, argmins)
}

#[test]
fn criterion_4_energy_oracle_and_qpbo() {
    let mut rng = seeded(104);

    // 200 submodular problems: min-cut value + offset = exhaustive minimum
    for round in 0..200 {
        let e = random_energy(&mut rng, 12, true);
        let (g, offset) = build_submodular(&e).unwrap();
        let cut = bk_solve(&g);
        let (best, _) = exhaustive_optima(&e);
        assert_eq!(cut.flow_value + offset, best, "round {round}");
    }

    // QPBO on submodular inputs labels every variable and matches the
    // direct construction; instances with a unique optimum, where both
    // labelings are forced
    let mut checked = 0;
    while checked < 100 {
        let e = random_energy(&mut rng, 10, true);
        let (best, optima) = exhaustive_optima(&e);
        if optima.len() != 1 {
            continue;
        }
        checked += 1;
        let (g, offset) = build_submodular(&e).unwrap();
        let direct = bk_solve(&g);
        assert_eq!(direct.flow_value + offset, best);
        let direct_labels: Vec<bool> = (0..e.var_count())
            .map(|k| direct.side[k] == Side::Source)
            .collect();
        assert_eq!(direct_labels, optima[0]);

        let gq = build_qpbo(&e).unwrap();
        let cut = bk_solve(&gq);
        let labels = extract_qpbo_labels(&e, &cut).unwrap();
        assert_eq!(labels.unlabeled_count(), 0, "submodular input fully labeled");
        let qpbo_labels: Vec<bool> = labels
            .label
            .iter()
            .map(|l| *l == QpboLabel::One)
            .collect();
        assert_eq!(qpbo_labels, direct_labels, "qpbo matches direct labeling");
    }

    // weak persistency on arbitrary (possibly non-submodular) inputs
    for round in 0..100 {
        let e = random_energy(&mut rng, 10, false);
        let gq = build_qpbo(&e).unwrap();
        let cut = bk_solve(&gq);
        let labels = extract_qpbo_labels(&e, &cut).unwrap();
        let (_, optima) = exhaustive_optima(&e);
        for (k, l) in labels.label.iter().enumerate() {
            let want = match l {
                QpboLabel::Zero => false,
                QpboLabel::One => true,
                QpboLabel::Unlabeled => continue,
            };
            assert!(
                optima.iter().any(|o| o[k] == want),
                "round {round}: label of variable {k} not attained by any optimum"
            );
        }
    }
    println!("criterion 4 (energy oracle, qpbo labeling and persistency): PASS");
}

#[test]
fn criterion_5_footprint_formulas() {
    let rows: [(MemModel, u64); 12] = [
        (MemModel::HiPr, 40_000 + 40_000 + 200_000),
        (MemModel::Hpf, 104_000 + 48_000 + 240_000),
        (MemModel::Eibfs, 72_000 + 360_000),
        (MemModel::EibfsI, 29_000 + 250_000),
        (MemModel::EibfsINr, 49_000 + 120_000),
        (MemModel::Bk, 48_000 + 320_000),
        (MemModel::Mbk, 143_000),
        (MemModel::MbkR, 23_000 + 240_000),
        (MemModel::PPpr, 48_000 + 68_000 + 340_000),
        (MemModel::LiuSun, 25_000 + 120_000),
        (MemModel::StrandmarkKahl, 29_000 + 120_000),
        (MemModel::PArd, 40_000 + 160_000),
    ];
    for (model, expect) in rows {
        assert_eq!(mem_footprint(model, 1000, 1000, 5000), expect, "{model}");
    }
    println!("criterion 5 (footprint formulas, all 12 rows at n=1000, m_T=1000, m_N=5000): PASS");
}

#[test]
fn criterion_6_determinism_and_neutrality() {
    let mut rng = seeded(106);
    for round in 0..100 {
        let inst = RawInstance::random(&mut rng, 20, 60, 9);
        let base = bk_solve(&inst.graph(false)).flow_value;

        // packing neutrality
        assert_eq!(bk_solve(&inst.graph(true)).flow_value, base, "pack {round}");

        // arc-merge neutrality
        let merged = inst.builder(true).build(false);
        assert_eq!(bk_solve(&merged).flow_value, base, "merge {round}");

        // thread-count independence
        let k = rng.gen_range(2..=4usize.min(inst.n).max(2));
        let ids: Vec<u32> = (0..inst.n)
            .map(|i| if i < k { i as u32 } else { rng.gen_range(0..k as u32) })
            .collect();
        let p = BlockPartition::from_block_ids(ids).unwrap();
        let mut values = Vec::new();
        for threads in [1, 2, 4, 8] {
            let g = inst.graph(false);
            values.push(liu_sun_solve(&g, &p, threads).flow_value);
        }
        assert!(values.iter().all(|v| *v == base), "threads {round}");

        // capacity scaling by k scales the value by exactly k and keeps an
        // optimal side assignment optimal
        let k: Cap = rng.gen_range(2..=7);
        let scaled = inst.scaled(k);
        let g = scaled.graph(false);
        let cut = bk_solve(&g);
        assert_eq!(cut.flow_value, base * k, "scale {round}");
        let orig = inst.graph(false);
        assert_eq!(orig.cut_capacity(&cut.side), base, "scaled cut stays optimal");
    }
    println!("criterion 6 (packing/merging/threads neutral, scaling exact): PASS");
}

#[test]
fn criterion_7_harness_protocol_and_round_trip() {
    // min-over-3 aggregation and the build/solve split
    let text = "p max 4 4\nn 1 s\nn 4 t\na 1 2 5\na 2 3 4\na 3 4 9\na 1 4 2\n";
    let problem = parse_problem(text).unwrap();
    let cfg = BenchConfig {
        dataset: "inline".into(),
        repeats: 3,
        ..BenchConfig::default()
    };
    let recs = maxflow::bench::run_bench(&problem, &[AlgId::Bk, AlgId::HpfHighestLifo], &cfg)
        .unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r.repeats == 3 && r.flow_value == 6));

    // fault injection: a deliberately broken solver must raise a mismatch
    let entries = vec![
        standard_entry(AlgId::Bk, &cfg),
        BenchEntry {
            name: "broken".into(),
            parallel: false,
            model: None,
            solver: Box::new(|g, _| {
                let mut cut = bk_solve(g);
                cut.flow_value += 1;
                Ok(cut)
            }),
        },
    ];
    match run_bench_custom(&problem, &entries, &cfg) {
        Err(BenchError::ValueMismatch { .. }) => {}
        other => panic!("expected ValueMismatch, got {other:?}"),
    }

    // DIMACS round trip preserves the max-flow value on the corpus
    let mut corpus: Vec<String> = Vec::new();
    for entry in std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "max") {
            corpus.push(std::fs::read_to_string(path).unwrap());
        }
    }
    let mut rng = seeded(107);
    for _ in 0..10 {
        let inst = RawInstance::random(&mut rng, 12, 30, 9);
        let g = inst.graph(false);
        corpus.push(write_dimacs(&g));
    }
    assert!(corpus.len() >= 10);
    for (k, text) in corpus.iter().enumerate() {
        let (b, _) = parse_dimacs(text).unwrap();
        let g = b.build(false);
        let v1 = bk_solve(&g).flow_value;
        let mut g = g;
        g.reset_residuals();
        let round = write_dimacs(&g);
        let (b2, _) = parse_dimacs(&round).unwrap();
        let v2 = bk_solve(&b2.build(false)).flow_value;
        assert_eq!(v1, v2, "corpus file {k}");
    }
    println!("criterion 7 (min-over-3, build/solve split, mismatch detection, round trip): PASS");
}

#[test]
fn criterion_8_selector() {
    // hand examples
    let s = RpSample {
        dataset: "d".into(),
        family: "f".into(),
        times: vec![("A".into(), 10.0), ("B".into(), 5.0)],
    };
    assert_eq!(rp_score(&s, "A").unwrap(), 0.5);
    assert_eq!(rp_score(&s, "B").unwrap(), 1.0);
    let s3 = RpSample {
        dataset: "d".into(),
        family: "f".into(),
        times: vec![("A".into(), 4.0), ("B".into(), 8.0), ("C".into(), 16.0)],
    };
    assert_eq!(rp_score(&s3, "C").unwrap(), 0.25);

    // family balancing
    let samples = vec![
        RpSample {
            dataset: "a".into(),
            family: "one".into(),
            times: vec![("A".into(), 10.0), ("B".into(), 5.0)],
        },
        RpSample {
            dataset: "b".into(),
            family: "two".into(),
            times: vec![("A".into(), 1.0), ("B".into(), 2.0)],
        },
        RpSample {
            dataset: "c".into(),
            family: "two".into(),
            times: vec![("A".into(), 1.0), ("B".into(), 3.0)],
        },
        RpSample {
            dataset: "d".into(),
            family: "two".into(),
            times: vec![("A".into(), 2.0), ("B".into(), 9.0)],
        },
    ];
    assert_eq!(mean_rp(&samples, |_| "A".to_string()).unwrap(), 0.75);

    // training on a synthetic separable set reaches training RP 1.0
    let mut rng = seeded(108);
    let mut x = Vec::new();
    let mut y: Vec<String> = Vec::new();
    let mut fams: Vec<String> = Vec::new();
    let mut rp: Vec<RpSample> = Vec::new();
    for i in 0..24 {
        let inst = RawInstance::random(&mut rng, 12, 24, 9);
        let g = inst.graph(false);
        let mut f = extract_features(&g, false);
        // plant a separating signal in the node count entry
        f.0[0] = if i % 2 == 0 { 10.0 } else { 1000.0 };
        let label = if i % 2 == 0 { "bk" } else { "hpf-hl" };
        x.push(f);
        y.push(label.to_string());
        fams.push(format!("fam{}", i % 3));
        let (fast, slow) = if label == "bk" {
            (("bk", 1.0), ("hpf-hl", 2.0))
        } else {
            (("hpf-hl", 1.0), ("bk", 2.0))
        };
        rp.push(RpSample {
            dataset: format!("d{i}"),
            family: format!("fam{}", i % 3),
            times: vec![(fast.0.into(), fast.1), (slow.0.into(), slow.1)],
        });
    }
    let tree = train_tree(&x, &y, &fams, 5, TrainOptions { rp: Some(&rp) });
    let training_rp = {
        let pred_of: std::collections::HashMap<String, String> = rp
            .iter()
            .zip(&x)
            .map(|(s, f)| (s.dataset.clone(), tree.predict(f).unwrap().to_string()))
            .collect();
        mean_rp(&rp, |s| pred_of[&s.dataset].clone()).unwrap()
    };
    assert_eq!(training_rp, 1.0, "separable training set reaches RP 1.0");

    // a capacity-scaled copy of a graph receives the same prediction
    for round in 0..20 {
        let inst = RawInstance::random(&mut rng, 15, 40, 9);
        let k: Cap = rng.gen_range(2..=9);
        let f1 = extract_features(&inst.graph(false), false);
        let f2 = extract_features(&inst.scaled(k).graph(false), false);
        assert_eq!(
            tree.predict(&f1).unwrap(),
            tree.predict(&f2).unwrap(),
            "round {round}"
        );
    }
    println!("criterion 8 (rp examples, balanced mean, training RP 1.0, scale-invariant prediction): PASS");
}

#[test]
fn criterion_9_region_discharge_bound() {
    let mut rng = seeded(109);
    let mut worst = (0usize, 0usize);
    for _ in 0..100 {
        let inst = RawInstance::random(&mut rng, 40, 120, 10);
        let k = rng.gen_range(1..=6usize.min(inst.n));
        let ids: Vec<u32> = (0..inst.n)
            .map(|i| if i < k { i as u32 } else { rng.gen_range(0..k as u32) })
            .collect();
        let p = BlockPartition::from_block_ids(ids).unwrap();
        let g = inst.graph(false);
        let (cut, stats) = ard_solve_with_stats(&g, &p, 2);
        assert_eq!(g.cut_capacity(&cut.side), cut.flow_value);
        let bound = 2 * stats.boundary_nodes * stats.boundary_nodes + 1;
        assert!(
            stats.sweeps <= bound,
            "sweeps {} exceed bound {bound}",
            stats.sweeps
        );
        if stats.sweeps > worst.0 {
            worst = (stats.sweeps, bound);
        }
    }
    println!(
        "criterion 9 (discharge sweep bound; worst observed {} of allowed {}): PASS",
        worst.0, worst.1
    );
}

/// Duality also holds for every record the harness produces, via the
/// cross-check; exercised here once with all ten algorithm ids.
#[test]
fn harness_runs_every_algorithm() {
    let text = "p max 6 7\nn 1 s\nn 6 t\na 1 2 7\na 1 3 4\na 2 4 3\na 3 4 2\na 3 5 5\na 4 6 6\na 5 6 2\n";
    let problem = parse_problem(text).unwrap();
    let blocks = BlockPartition::from_block_ids(vec![0, 0, 1, 1]).unwrap();
    let cfg = BenchConfig {
        dataset: "six".into(),
        threads: &[1, 2],
        repeats: 2,
        pack: false,
        blocks: Some(&blocks),
        dd_max_iters: 2000,
    };
    let recs = maxflow::bench::run_bench(&problem, &AlgId::ALL, &cfg).unwrap();
    assert!(recs.iter().all(|r| r.flow_value == recs[0].flow_value));
    // parallel algorithms get a record per thread count
    assert_eq!(recs.len(), 7 + 3 * 2);
}
