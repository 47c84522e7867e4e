//! End-to-end tests of the `cactus` binary: output shapes, the exit-code
//! contract, and byte-level determinism of repeated runs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cactus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cactus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("cactus-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn count_pure_five_sequence() {
    let out = cactus(&[
        "count",
        "--embedding",
        "plane",
        "--omega",
        "{5}",
        "--labeled",
        "no",
        "--terms",
        "45",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# min-realizable-size: 5"));
    assert!(text.contains("5,1\n"));
    assert!(text.contains("13,3\n"));
    assert!(text.contains("45,48344880\n"));
}

#[test]
fn count_family_equals_grammar_file() {
    let grammar = tmp("pu5.gram");
    std::fs::write(
        &grammar,
        "@mode unlabeled;\n@omega {5};\n@root T_S + T_P - T_SP;\n\
         S_C = Cyc(>=2; P);\nS_X = Z * Seq(>=1; P);\nP = Seq(in Omega-1; Z + S_X);\n\
         T_S = Z * S_C;\nT_P = Cyc(in Omega; Z + S_X);\nT_SP = P * S_X;\n",
    )
    .unwrap();
    let family = cactus(&[
        "count", "--embedding", "plane", "--omega", "{5}", "--terms", "30",
    ]);
    let file = cactus(&["count", "--grammar", grammar.to_str().unwrap(), "--terms", "30"]);
    assert!(family.status.success() && file.status.success());
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.to_string())
            .collect()
    };
    assert_eq!(strip(stdout(&family)), strip(stdout(&file)));
    std::fs::remove_file(grammar).unwrap();
}

#[test]
fn count_json_format() {
    let out = cactus(&[
        "count",
        "--embedding",
        "free",
        "--rooted",
        "--omega",
        "{2}",
        "--terms",
        "6",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["mode"], "unlabeled");
    assert_eq!(v["min_realizable_size"], 2);
    assert_eq!(v["counts"][5], "9");
}

#[test]
fn sample_runs_are_byte_identical() {
    let args = [
        "sample",
        "--embedding",
        "plane",
        "--rooted",
        "--omega",
        ">=4",
        "--size",
        "80",
        "--seed",
        "12",
        "--format",
        "dot",
    ];
    let a = cactus(&args);
    let b = cactus(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("// seed: 12"));
    assert!(text.contains("// rng: splitmix64"));
}

#[test]
fn sample_edgelist_parses_back() {
    let out = cactus(&[
        "sample",
        "--embedding",
        "free",
        "--rooted",
        "--labeled",
        "yes",
        "--omega",
        ">=2",
        "--size",
        "20",
        "--seed",
        "3",
        "--format",
        "edgelist",
    ]);
    assert!(out.status.success());
    let g = cactus_core::SimpleGraph::from_edge_list(&stdout(&out)).unwrap();
    assert_eq!(g.vertex_count(), 20);
    assert!(g.is_cactus().unwrap());
}

#[test]
fn svg_sample_output() {
    let out = cactus(&[
        "sample",
        "--embedding",
        "plane",
        "--rooted",
        "--omega",
        "{3}",
        "--size",
        "9",
        "--seed",
        "4",
        "--format",
        "svg",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("<svg"));
    assert_eq!(text.matches("<circle").count(), 9);
}

#[test]
fn exit_code_contract() {
    // 2: invalid flag combination (unimplemented sampler family)
    let out = cactus(&[
        "sample", "--embedding", "free", "--rooted", "--omega", ">=2", "--size", "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // 2: clap usage error
    let out = cactus(&["count", "--terms"]);
    assert_eq!(out.status.code(), Some(2));
    // 3: grammar validation failure
    let gram = tmp("bad.gram");
    std::fs::write(&gram, "A = Set(>=0; 1 + Z);\n").unwrap();
    let out = cactus(&["count", "--grammar", gram.to_str().unwrap(), "--terms", "5"]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::remove_file(gram).unwrap();
    // 4: oracle resource guard
    let out = cactus(&["oracle", "census", "--omega", ">=2", "--max-n", "9"]);
    assert_eq!(out.status.code(), Some(4));
    // 5: unrealizable sample size, nearest sizes reported
    let out = cactus(&[
        "sample", "--embedding", "plane", "--rooted", "--omega", "{5}", "--size", "4",
    ]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nearest realizable sizes: 5"));
    // 6: non-cactus decompose input
    let k4 = tmp("k4.edgelist");
    std::fs::write(&k4, "4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n").unwrap();
    let out = cactus(&["splittree", "decompose", k4.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(6));
    std::fs::remove_file(k4).unwrap();
    // 7: invalid tree
    let bad = tmp("bad.glt");
    std::fs::write(
        &bad,
        "glt free\nnode 0 cycle 4\nnode 1 leaf 1\nnode 2 leaf 2\nnode 3 leaf 3\nnode 4 leaf 4\n\
         edge 0:0 1\nedge 0:1 2\nedge 0:2 3\nedge 0:3 4\n",
    )
    .unwrap();
    let out = cactus(&["splittree", "validate", bad.to_str().unwrap(), "--form", "reduced"]);
    assert_eq!(out.status.code(), Some(7));
    // the same tree is fine in simplified form
    let out = cactus(&[
        "splittree",
        "validate",
        bad.to_str().unwrap(),
        "--form",
        "simplified",
    ]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_file(bad).unwrap();
}

#[test]
fn splittree_round_trip_via_files() {
    let c4 = tmp("c4.edgelist");
    std::fs::write(&c4, "4 4\n1 2\n2 3\n3 4\n4 1\n").unwrap();
    let glt_path = tmp("c4.glt");
    let out = cactus(&[
        "splittree",
        "decompose",
        c4.to_str().unwrap(),
        "--form",
        "reduced",
        "--format",
        "glt",
        "--output",
        glt_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let glt_text = std::fs::read_to_string(&glt_path).unwrap();
    assert_eq!(glt_text.matches("star 2").count(), 2);
    let out = cactus(&["splittree", "compose", glt_path.to_str().unwrap()]);
    assert!(out.status.success());
    let g = cactus_core::SimpleGraph::from_edge_list(&stdout(&out)).unwrap();
    let expect = cactus_core::SimpleGraph::from_edge_list("4 4\n1 2\n2 3\n3 4\n4 1\n").unwrap();
    assert!(g.same_graph(&expect));
    // accessibility agrees with compose on edges
    let out = cactus(&["splittree", "accessibility", glt_path.to_str().unwrap()]);
    assert!(out.status.success());
    let g2 = cactus_core::SimpleGraph::from_edge_list(&stdout(&out)).unwrap();
    assert!(g2.same_graph(&expect));
    std::fs::remove_file(c4).unwrap();
    std::fs::remove_file(glt_path).unwrap();
}

#[test]
fn accessibility_of_prime_labeled_tree() {
    // a tree whose leftmost label is a prime 5-cycle on markers 0..4,
    // leaves 1..5 on its markers: leaf 5 is adjacent to leaf 4 (markers 4
    // and 3 are label-adjacent) but not to leaf 3 (that path would need two
    // interior edges of the prime label)
    let glt = tmp("fig3-style.glt");
    std::fs::write(
        &glt,
        "glt free\nnode 0 graph 5 0-1 1-2 2-3 3-4 0-4\n\
         node 1 leaf 1\nnode 2 leaf 2\nnode 3 leaf 3\nnode 4 leaf 4\nnode 5 leaf 5\n\
         edge 0:0 1\nedge 0:1 2\nedge 0:2 3\nedge 0:3 4\nedge 0:4 5\n",
    )
    .unwrap();
    let out = cactus(&["splittree", "accessibility", glt.to_str().unwrap()]);
    assert!(out.status.success());
    let g = cactus_core::SimpleGraph::from_edge_list(&stdout(&out)).unwrap();
    assert!(g.contains_edge(5, 4));
    assert!(!g.contains_edge(5, 3));
    std::fs::remove_file(glt).unwrap();
}

#[test]
fn oracle_census_csv() {
    let out = cactus(&["oracle", "census", "--omega", ">=2", "--max-n", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n,labeled,unlabeled"));
    assert!(text.contains("3,4,2"));
    assert!(text.contains("4,31,4"));
}

#[test]
fn oracle_structures_counts() {
    let gram = tmp("tree.gram");
    std::fs::write(&gram, "B = Z * Seq(B);\n").unwrap();
    let out = cactus(&[
        "oracle",
        "structures",
        "--grammar",
        gram.to_str().unwrap(),
        "--size",
        "4",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("4,5"));
    std::fs::remove_file(gram).unwrap();
}
