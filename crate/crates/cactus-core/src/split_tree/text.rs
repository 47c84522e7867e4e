//! Plain-text serialization for graph-labeled trees.
//!
//! ```text
//! glt plane            # or: glt free
//! node 0 leaf 1
//! node 1 star 2        # star with 2 extremities; marker 0 is the center
//! node 2 cycle 5       # markers 0..5 in cyclic order
//! node 3 clique 4
//! node 4 graph 5 0-1 1-2 2-3 3-4 4-0
//! edge 0 1:0           # leaf 0 to marker 0 of node 1
//! edge 1:1 2:3
//! ```
//!
//! Node ids are explicit and preserved, so a file round-trips exactly;
//! 4-cycle star pairs rely on the creation order of their halves.

use super::{GraphLabeledTree, NodeLabel, TreeError, TreeNode};
use std::collections::BTreeSet;
use std::fmt::Write as _;

pub fn glt_to_text(tree: &GraphLabeledTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "glt {}", if tree.plane { "plane" } else { "free" });
    for (id, node) in tree.nodes() {
        match node {
            TreeNode::Leaf { vertex } => {
                let _ = writeln!(out, "node {id} leaf {vertex}");
            }
            TreeNode::Internal { label } => match label {
                NodeLabel::Star { extremities } => {
                    let _ = writeln!(out, "node {id} star {extremities}");
                }
                NodeLabel::Cycle { size } => {
                    let _ = writeln!(out, "node {id} cycle {size}");
                }
                NodeLabel::Clique { size } => {
                    let _ = writeln!(out, "node {id} clique {size}");
                }
                NodeLabel::Explicit { size, edges } => {
                    let parts: Vec<String> =
                        edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                    let _ = writeln!(out, "node {id} graph {size} {}", parts.join(" "));
                }
            },
        }
    }
    for (a, b) in tree.edges() {
        let fmt_end = |n: usize| -> String {
            match tree.node(n) {
                Some(TreeNode::Leaf { .. }) => n.to_string(),
                _ => format!("{}:{}", n, tree.marker_of(n, if n == a { b } else { a }).unwrap()),
            }
        };
        let _ = writeln!(out, "edge {} {}", fmt_end(a), fmt_end(b));
    }
    out
}

pub fn glt_from_text(text: &str) -> Result<GraphLabeledTree, TreeError> {
    let mut tree: Option<GraphLabeledTree> = None;
    let mut declared: Vec<usize> = Vec::new();
    let err = |line: usize, message: &str| TreeError::Parse {
        line,
        message: message.to_string(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("glt") => {
                let plane = match tokens.next() {
                    Some("plane") => true,
                    Some("free") => false,
                    _ => return Err(err(line_no, "expected 'glt plane' or 'glt free'")),
                };
                tree = Some(GraphLabeledTree::new(plane));
            }
            Some("node") => {
                let tree = tree
                    .as_mut()
                    .ok_or_else(|| err(line_no, "missing 'glt' header"))?;
                let id: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line_no, "expected node id"))?;
                if id != declared.len() {
                    return Err(err(line_no, "node ids must be declared in order 0,1,2,..."));
                }
                let kind = tokens
                    .next()
                    .ok_or_else(|| err(line_no, "expected node kind"))?;
                let arg: u64 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line_no, "expected a number after node kind"))?;
                let created = match kind {
                    "leaf" => tree.add_leaf(arg as u32),
                    "star" => tree.add_internal(NodeLabel::Star {
                        extremities: arg as usize,
                    }),
                    "cycle" => tree.add_internal(NodeLabel::Cycle { size: arg as usize }),
                    "clique" => tree.add_internal(NodeLabel::Clique { size: arg as usize }),
                    "graph" => {
                        let mut edges = BTreeSet::new();
                        for tok in tokens.by_ref() {
                            let (a, b) = tok
                                .split_once('-')
                                .ok_or_else(|| err(line_no, "expected marker pairs a-b"))?;
                            let a: usize = a
                                .parse()
                                .map_err(|_| err(line_no, "bad marker in edge pair"))?;
                            let b: usize = b
                                .parse()
                                .map_err(|_| err(line_no, "bad marker in edge pair"))?;
                            edges.insert((a.min(b), a.max(b)));
                        }
                        tree.add_internal(NodeLabel::Explicit {
                            size: arg as usize,
                            edges,
                        })
                    }
                    _ => return Err(err(line_no, "unknown node kind")),
                };
                declared.push(created);
            }
            Some("edge") => {
                let tree = tree
                    .as_mut()
                    .ok_or_else(|| err(line_no, "missing 'glt' header"))?;
                let parse_end = |tok: Option<&str>| -> Result<(usize, usize), TreeError> {
                    let tok = tok.ok_or_else(|| err(line_no, "expected edge endpoint"))?;
                    match tok.split_once(':') {
                        Some((n, m)) => Ok((
                            n.parse().map_err(|_| err(line_no, "bad node id"))?,
                            m.parse().map_err(|_| err(line_no, "bad marker"))?,
                        )),
                        None => Ok((
                            tok.parse().map_err(|_| err(line_no, "bad node id"))?,
                            0,
                        )),
                    }
                };
                let (a, ma) = parse_end(tokens.next())?;
                let (b, mb) = parse_end(tokens.next())?;
                tree.connect(a, ma, b, mb)?;
            }
            _ => return Err(err(line_no, "expected 'glt', 'node' or 'edge'")),
        }
    }
    let tree = tree.ok_or_else(|| err(1, "empty input"))?;
    tree.validate_structure()?;
    Ok(tree)
}

/// Deterministic serialization with node ids renumbered by a marker-ordered
/// walk from the smallest leaf. Two representations of the same tree print
/// identically, which the conversion round-trip tests rely on. Intended for
/// comparison only: the renumbering may swap the halves of a 4-cycle star
/// pair, so do not parse the result back when plane orientation matters.
pub fn canonical_text(tree: &GraphLabeledTree) -> Result<String, TreeError> {
    tree.validate_structure()?;
    let (start, _) = tree
        .leaves()
        .min_by_key(|&(_, v)| v)
        .ok_or(TreeError::NotATree)?;
    let mut order: Vec<usize> = vec![start];
    let mut seen: BTreeSet<usize> = BTreeSet::from([start]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        // visit neighbors in marker order for determinism
        let mut nbrs: Vec<(usize, usize)> = tree
            .neighbors(n)
            .map(|w| (tree.marker_of(n, w).unwrap(), w))
            .collect();
        nbrs.sort_unstable();
        for (_, w) in nbrs {
            if seen.insert(w) {
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let renum: std::collections::BTreeMap<usize, usize> = order
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let mut out = GraphLabeledTree::new(tree.plane);
    for &old in &order {
        match tree.node(old).unwrap() {
            TreeNode::Leaf { vertex } => {
                out.add_leaf(*vertex);
            }
            TreeNode::Internal { label } => {
                out.add_internal(label.clone());
            }
        }
    }
    for (a, b) in tree.edges() {
        let ma = tree.marker_of(a, b).unwrap();
        let mb = tree.marker_of(b, a).unwrap();
        out.connect(renum[&a], ma, renum[&b], mb)
            .map_err(|_| TreeError::NotATree)?;
    }
    Ok(glt_to_text(&out))
}
