//! DOT export for graphs and graph-labeled trees.
//!
//! Trees render each internal node as a cluster of hollow marker vertices
//! with dashed interior label edges; leaves are solid dots and tree edges
//! connect markers across clusters.

use crate::graph::SimpleGraph;
use crate::split_tree::{GraphLabeledTree, NodeLabel, TreeNode};
use std::fmt::Write as _;

/// Plain graph in DOT, with optional `//` metadata comment lines up front.
pub fn graph_to_dot(g: &SimpleGraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "// {c}");
    }
    let _ = writeln!(out, "graph cactus {{");
    let _ = writeln!(out, "    node [shape=point, width=0.12];");
    for v in g.vertices() {
        let _ = writeln!(out, "    v{v};");
    }
    for (u, v) in g.edges() {
        let _ = writeln!(out, "    v{u} -- v{v};");
    }
    let _ = writeln!(out, "}}");
    out
}

/// Graph-labeled tree in DOT.
pub fn glt_to_dot(tree: &GraphLabeledTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph split_tree {{");
    let _ = writeln!(out, "    compound=true;");
    for (id, node) in tree.nodes() {
        match node {
            TreeNode::Leaf { vertex } => {
                let _ = writeln!(
                    out,
                    "    leaf{id} [label=\"{vertex}\", shape=circle, style=filled, fillcolor=black, fontcolor=white, width=0.25];"
                );
            }
            TreeNode::Internal { label } => {
                let kind = match label {
                    NodeLabel::Star { .. } => "star",
                    NodeLabel::Cycle { size } => {
                        if *size == 3 {
                            "cycle (clique)"
                        } else {
                            "cycle"
                        }
                    }
                    NodeLabel::Clique { .. } => "clique",
                    NodeLabel::Explicit { .. } => "prime",
                };
                let _ = writeln!(out, "    subgraph cluster{id} {{");
                let _ = writeln!(out, "        label=\"{kind}\";");
                let _ = writeln!(out, "        style=rounded;");
                for m in 0..label.size() {
                    let marker_label = match label {
                        NodeLabel::Star { .. } if m == 0 => "c".to_string(),
                        _ => String::new(),
                    };
                    let _ = writeln!(
                        out,
                        "        n{id}_{m} [label=\"{marker_label}\", shape=circle, style=solid, width=0.18];"
                    );
                }
                // interior label edges, dashed
                for a in 0..label.size() {
                    for b in (a + 1)..label.size() {
                        if label.adjacent(a, b) {
                            let _ = writeln!(out, "        n{id}_{a} -- n{id}_{b} [style=dashed];");
                        }
                    }
                }
                let _ = writeln!(out, "    }}");
            }
        }
    }
    for (a, b) in tree.edges() {
        let end = |n: usize, other: usize| -> String {
            match tree.node(n) {
                Some(TreeNode::Leaf { .. }) => format!("leaf{n}"),
                _ => format!("n{}_{}", n, tree.marker_of(n, other).unwrap()),
            }
        };
        let _ = writeln!(out, "    {} -- {};", end(a, b), end(b, a));
    }
    let _ = writeln!(out, "}}");
    out
}
