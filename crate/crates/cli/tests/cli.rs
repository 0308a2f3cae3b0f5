//! End-to-end checks of the command-line surface.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxflow"))
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("maxflow-cli-test-{}-{name}", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

const CHAIN: &str = "c chain\np max 3 2\nn 1 s\nn 3 t\na 1 2 5\na 2 3 3\n";

#[test]
fn solve_prints_flow_value() {
    let input = write_temp("chain.max", CHAIN);
    for alg in ["bk", "ppr-fifo", "ppr-hi", "hpf-hf", "hpf-hl", "hpf-lf", "hpf-ll"] {
        let out = bin()
            .args(["solve", "--alg", alg, "--input"])
            .arg(&input)
            .output()
            .unwrap();
        assert!(out.status.success(), "{alg}: {out:?}");
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "3", "{alg}");
    }
}

#[test]
fn solve_parallel_with_blocks_file() {
    let input = write_temp("two.max", "p max 4 3\nn 1 s\nn 4 t\na 1 2 5\na 2 3 4\na 3 4 9\n");
    let blocks = write_temp("two.blocks", "0\n1\n");
    for alg in ["liusun", "ard", "dd"] {
        let out = bin()
            .args(["solve", "--alg", alg, "--threads", "2", "--blocks"])
            .arg(&blocks)
            .arg("--input")
            .arg(&input)
            .output()
            .unwrap();
        assert!(out.status.success(), "{alg}: {out:?}");
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4", "{alg}");
    }
}

#[test]
fn bench_emits_csv_rows() {
    let input = write_temp("bench.max", CHAIN);
    let out = bin()
        .args(["bench", "--algs", "bk,hpf-hl", "--repeats", "2", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.trim().lines().collect();
    assert_eq!(lines.len(), 3); // header + one row per algorithm
    assert!(lines[0].starts_with("dataset,algorithm,threads"));
    assert!(lines[1].contains(",bk,") && lines[1].contains(",3,"));
    assert!(lines[2].contains(",hpf-hl,"));
}

#[test]
fn bench_jsonl_format() {
    let input = write_temp("bench2.max", CHAIN);
    let out = bin()
        .args(["bench", "--algs", "bk", "--format", "jsonl", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.trim().starts_with('{') && stdout.contains("\"flow_value\":3"));
}

#[test]
fn features_emits_31_columns() {
    let input = write_temp("feat.max", CHAIN);
    let out = bin()
        .args(["features", "--input"])
        .arg(&input)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.trim().lines().collect();
    assert_eq!(lines[0].split(',').count(), 31);
    assert_eq!(lines[1].split(',').count(), 31);
}

#[test]
fn select_with_depth_zero_tree_prints_its_label() {
    let input = write_temp("sel.max", CHAIN);
    let tree = write_temp("leaf.tree", "leaf 0 label hpf-hl\n");
    let out = bin()
        .args(["select", "--tree"])
        .arg(&tree)
        .arg("--input")
        .arg(&input)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "hpf-hl");
}

#[test]
fn split_emits_partition_file() {
    let out = bin()
        .args(["split", "--grid", "4x2", "--blocks", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "0\n0\n1\n1\n0\n0\n1\n1\n");
}

#[test]
fn convert_merges_duplicates() {
    let input = write_temp("dup.max", "p max 3 2\nn 1 s\nn 3 t\na 1 2 3\na 1 2 3\n");
    let output = std::env::temp_dir().join(format!("maxflow-cli-out-{}.max", std::process::id()));
    let st = bin()
        .args(["convert", "--input"])
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&output).unwrap();
    assert!(text.contains("a 1 2 6"), "{text}");
}

#[test]
fn failures_exit_nonzero_with_one_line() {
    let out = bin()
        .args(["solve", "--alg", "bk", "--input", "/no/such/file"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim().lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));

    let bad = write_temp("bad.max", "p max 3 1\nn 1 s\na 1 2 5\n");
    let out = bin()
        .args(["solve", "--alg", "bk", "--input"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing sink"));
}
