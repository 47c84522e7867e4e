//! Graph-labeled trees and the split decomposition of cactus graphs.
//!
//! A graph-labeled tree is a tree whose internal nodes carry label graphs;
//! each tree edge at an internal node lands on a distinct *marker vertex* of
//! the label. Two leaves are adjacent in the accessibility graph iff the tree
//! path between them crosses every intermediate label through one of its
//! interior edges.

mod decompose;
mod text;

pub use decompose::{cactus_to_split_tree, convert_form, split_tree_to_cactus, TreeForm};
pub use text::{canonical_text, glt_from_text, glt_to_text};

use crate::graph::{GraphError, SimpleGraph};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {0} is not a tree node")]
    UnknownNode(NodeId),
    #[error("marker {marker} out of range for node {node}")]
    BadMarker { node: NodeId, marker: usize },
    #[error("marker {marker} of node {node} already carries a tree edge")]
    MarkerInUse { node: NodeId, marker: usize },
    #[error("the underlying structure is not a tree (disconnected or cyclic)")]
    NotATree,
    #[error("node {node} has {found} tree edges but its label has {expected} markers")]
    RhoNotBijective {
        node: NodeId,
        found: usize,
        expected: usize,
    },
    #[error("leaf {node} must have exactly one tree edge")]
    LeafDegree { node: NodeId },
    #[error("input graph is not a cactus (offending block: {block:?})")]
    NotCactus { block: Vec<u32> },
    #[error("rotation at vertex {vertex} is not a planar cactus embedding")]
    NonPlanarRotation { vertex: u32 },
    #[error(
        "bridge {u}-{v} joins two cut vertices; the simplified tree form cannot express it \
         (star extremities may only attach to leaves or polygons)"
    )]
    SimplifiedFormUnavailable { u: u32, v: u32 },
    #[error("tree is not a valid cactus split tree: {0}")]
    InvalidTree(String),
    #[error("graph too large for exhaustive split search ({0} vertices, limit 20)")]
    SplitSizeGuard(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Label graph of an internal node. Markers are indices `0..size`.
/// For stars, marker 0 is the center and `1..=extremities` the extremities.
/// For cycles, markers are in cyclic order. A cycle of size 3 is also a
/// clique; validators treat it as a polygon, which subsumes the clique rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeLabel {
    Clique { size: usize },
    Star { extremities: usize },
    Cycle { size: usize },
    Explicit { size: usize, edges: BTreeSet<(usize, usize)> },
}

impl NodeLabel {
    pub fn size(&self) -> usize {
        match self {
            NodeLabel::Clique { size } | NodeLabel::Cycle { size } | NodeLabel::Explicit { size, .. } => {
                *size
            }
            NodeLabel::Star { extremities } => extremities + 1,
        }
    }

    /// Interior adjacency between two markers of this label.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        match self {
            NodeLabel::Clique { .. } => true,
            NodeLabel::Star { .. } => a == 0 || b == 0,
            NodeLabel::Cycle { size } => {
                let d = (a + size - b) % size;
                d == 1 || d == size - 1
            }
            NodeLabel::Explicit { edges, .. } => {
                edges.contains(&(a.min(b), a.max(b)))
            }
        }
    }

    /// Cycle size when the label acts as a polygon (a size-3 clique counts).
    pub fn polygon_size(&self) -> Option<usize> {
        match self {
            NodeLabel::Cycle { size } => Some(*size),
            NodeLabel::Clique { size: 3 } => Some(3),
            _ => None,
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, NodeLabel::Star { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Leaf { vertex: u32 },
    Internal { label: NodeLabel },
}

/// A graph-labeled tree. `links[n]` maps each neighbor of `n` to the marker
/// index the connecting edge occupies at `n` (0 for leaves).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphLabeledTree {
    nodes: Vec<TreeNode>,
    links: Vec<BTreeMap<NodeId, usize>>,
    pub plane: bool,
}

impl GraphLabeledTree {
    pub fn new(plane: bool) -> Self {
        GraphLabeledTree {
            nodes: Vec::new(),
            links: Vec::new(),
            plane,
        }
    }

    pub fn add_leaf(&mut self, vertex: u32) -> NodeId {
        self.nodes.push(TreeNode::Leaf { vertex });
        self.links.push(BTreeMap::new());
        self.nodes.len() - 1
    }

    pub fn add_internal(&mut self, label: NodeLabel) -> NodeId {
        self.nodes.push(TreeNode::Internal { label });
        self.links.push(BTreeMap::new());
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> Option<&TreeNode> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &TreeNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn label(&self, id: NodeId) -> Option<&NodeLabel> {
        match self.nodes.get(id) {
            Some(TreeNode::Internal { label }) => Some(label),
            _ => None,
        }
    }

    pub fn leaf_vertex(&self, id: NodeId) -> Option<u32> {
        match self.nodes.get(id) {
            Some(TreeNode::Leaf { vertex }) => Some(*vertex),
            _ => None,
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match n {
            TreeNode::Leaf { vertex } => Some((i, *vertex)),
            _ => None,
        })
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.links.get(id).into_iter().flat_map(|m| m.keys().copied())
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.links.get(id).map_or(0, |m| m.len())
    }

    /// Marker index the edge to `neighbor` occupies at `id`.
    pub fn marker_of(&self, id: NodeId, neighbor: NodeId) -> Option<usize> {
        self.links.get(id).and_then(|m| m.get(&neighbor)).copied()
    }

    /// Neighbor attached at marker `marker` of internal node `id`.
    pub fn neighbor_at_marker(&self, id: NodeId, marker: usize) -> Option<NodeId> {
        self.links
            .get(id)?
            .iter()
            .find(|(_, &m)| m == marker)
            .map(|(&n, _)| n)
    }

    fn marker_capacity(&self, id: NodeId) -> usize {
        match &self.nodes[id] {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { label } => label.size(),
        }
    }

    /// Connect two nodes. Internal endpoints specify which marker the edge
    /// lands on; leaf endpoints always use 0.
    pub fn connect(
        &mut self,
        a: NodeId,
        marker_a: usize,
        b: NodeId,
        marker_b: usize,
    ) -> Result<(), TreeError> {
        for (&node, &marker) in [(&a, &marker_a), (&b, &marker_b)] {
            if node >= self.nodes.len() {
                return Err(TreeError::UnknownNode(node));
            }
            if marker >= self.marker_capacity(node) {
                return Err(TreeError::BadMarker { node, marker });
            }
            if self.links[node].values().any(|&m| m == marker) {
                return Err(TreeError::MarkerInUse { node, marker });
            }
        }
        self.links[a].insert(b, marker_a);
        self.links[b].insert(a, marker_b);
        Ok(())
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (a, m) in self.links.iter().enumerate() {
            for &b in m.keys() {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Structural validity: a connected acyclic shape, every internal node's
    /// tree edges in bijection with its markers, every leaf of degree 1
    /// (single-node trees are allowed).
    pub fn validate_structure(&self) -> Result<(), TreeError> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(TreeError::NotATree);
        }
        let edge_count: usize = self.links.iter().map(|m| m.len()).sum::<usize>() / 2;
        if edge_count != n - 1 {
            return Err(TreeError::NotATree);
        }
        let mut seen = BTreeSet::from([0usize]);
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() != n {
            return Err(TreeError::NotATree);
        }
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                TreeNode::Leaf { .. } => {
                    if n > 1 && self.links[id].len() != 1 {
                        return Err(TreeError::LeafDegree { node: id });
                    }
                }
                TreeNode::Internal { label } => {
                    let markers: BTreeSet<usize> = self.links[id].values().copied().collect();
                    if markers.len() != self.links[id].len()
                        || self.links[id].len() != label.size()
                        || markers.iter().any(|&m| m >= label.size())
                    {
                        return Err(TreeError::RhoNotBijective {
                            node: id,
                            found: self.links[id].len(),
                            expected: label.size(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The accessibility (original) graph: vertices are the leaves, and two
    /// leaves are adjacent iff an alternated path joins them.
    pub fn accessibility(&self) -> Result<SimpleGraph, TreeError> {
        self.validate_structure()?;
        let mut g = SimpleGraph::new();
        for (_, v) in self.leaves() {
            g.add_vertex(v);
        }
        for (leaf_id, leaf_vertex) in self.leaves() {
            // walk directed edge states outward from this leaf
            let mut stack: Vec<(NodeId, NodeId)> = self
                .neighbors(leaf_id)
                .map(|n| (leaf_id, n))
                .collect();
            let mut visited: BTreeSet<(NodeId, NodeId)> = stack.iter().copied().collect();
            while let Some((from, to)) = stack.pop() {
                match &self.nodes[to] {
                    TreeNode::Leaf { vertex } => {
                        if *vertex != leaf_vertex && !g.contains_edge(leaf_vertex, *vertex) {
                            g.add_edge(leaf_vertex, *vertex)?;
                        }
                    }
                    TreeNode::Internal { label } => {
                        let in_marker = self.links[to][&from];
                        for (&next, &out_marker) in &self.links[to] {
                            if next != from
                                && label.adjacent(in_marker, out_marker)
                                && visited.insert((to, next))
                            {
                                stack.push((to, next));
                            }
                        }
                    }
                }
            }
        }
        Ok(g)
    }
}

/// How a tree edge endpoint sits on its node, as the validators see it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EndpointKind {
    Leaf,
    StarCenter,
    StarExtremity,
    PolygonMarker,
    Other,
}

fn endpoint_kind(tree: &GraphLabeledTree, node: NodeId, marker: usize) -> EndpointKind {
    match &tree.nodes[node] {
        TreeNode::Leaf { .. } => EndpointKind::Leaf,
        TreeNode::Internal { label } => match label {
            NodeLabel::Star { .. } => {
                if marker == 0 {
                    EndpointKind::StarCenter
                } else {
                    EndpointKind::StarExtremity
                }
            }
            _ if label.polygon_size().is_some() => EndpointKind::PolygonMarker,
            _ => EndpointKind::Other,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

impl fmt::Display for TreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            write!(f, "valid")
        } else {
            write!(f, "invalid: {}", self.diagnostics.join("; "))
        }
    }
}

/// Check the reduced-form characterization: labels are stars or polygons of
/// size 3 or at least 5; star centers attach to leaves or (for star pairs
/// with exactly two extremities each) to another center; star extremities
/// attach to polygons, leaves, or other extremities; no two polygons are
/// adjacent; and the Cunningham conditions (degree >= 3 internal nodes, no
/// clique-clique edges, no center-to-extremity edges) hold.
pub fn validate_reduced_cactus_tree(tree: &GraphLabeledTree) -> TreeReport {
    validate_cactus_tree(tree, TreeForm::Reduced)
}

/// Check the simplified-form characterization: internal nodes are stars and
/// polygons (any size >= 3), star centers attach to leaves, star extremities
/// attach to leaves or polygons. Two supplements keep the correspondence
/// bijective: polygons are never adjacent and stars have >= 2 extremities.
pub fn validate_simplified_cactus_tree(tree: &GraphLabeledTree) -> TreeReport {
    validate_cactus_tree(tree, TreeForm::Simplified)
}

fn validate_cactus_tree(tree: &GraphLabeledTree, form: TreeForm) -> TreeReport {
    let mut diags = Vec::new();
    if let Err(e) = tree.validate_structure() {
        return TreeReport {
            valid: false,
            diagnostics: vec![e.to_string()],
        };
    }
    for (id, node) in tree.nodes().collect::<Vec<_>>() {
        let TreeNode::Internal { label } = node else {
            continue;
        };
        match label {
            NodeLabel::Star { extremities } => {
                if *extremities < 2 {
                    diags.push(format!(
                        "node {id}: star with {extremities} extremity(ies); internal nodes need degree at least 3"
                    ));
                }
            }
            _ => match label.polygon_size() {
                Some(k) => {
                    if k < 3 {
                        diags.push(format!("node {id}: polygon of size {k} is not a graph label"));
                    }
                    if form == TreeForm::Reduced && k == 4 {
                        diags.push(format!(
                            "node {id}: cycle of size 4 (reduced trees use polygons of size 3 or at least 5)"
                        ));
                    }
                }
                None => {
                    diags.push(format!(
                        "node {id}: label is neither a star nor a polygon"
                    ));
                }
            },
        }
    }
    for (a, b) in tree.edges() {
        let ma = tree.marker_of(a, b).unwrap();
        let mb = tree.marker_of(b, a).unwrap();
        let ka = endpoint_kind(tree, a, ma);
        let kb = endpoint_kind(tree, b, mb);
        for (node, kind, other_kind, other) in [(a, ka, kb, b), (b, kb, ka, a)] {
            match kind {
                EndpointKind::StarCenter => {
                    let ok = match other_kind {
                        EndpointKind::Leaf => true,
                        EndpointKind::StarCenter if form == TreeForm::Reduced => {
                            // both stars must have exactly two extremities
                            let two = |n: NodeId| {
                                matches!(
                                    tree.label(n),
                                    Some(NodeLabel::Star { extremities: 2 })
                                )
                            };
                            if two(node) && two(other) {
                                true
                            } else {
                                diags.push(format!(
                                    "edge {node}-{other}: center-to-center link between stars that do not both have exactly two extremities"
                                ));
                                continue;
                            }
                        }
                        _ => false,
                    };
                    if !ok {
                        diags.push(format!(
                            "node {node}: star center attached to {other_kind:?} (node {other})"
                        ));
                    }
                }
                EndpointKind::StarExtremity => {
                    let ok = match other_kind {
                        EndpointKind::Leaf | EndpointKind::PolygonMarker => true,
                        EndpointKind::StarExtremity => form == TreeForm::Reduced,
                        _ => false,
                    };
                    if !ok {
                        diags.push(format!(
                            "node {node}: star extremity attached to {other_kind:?} (node {other})"
                        ));
                    }
                }
                EndpointKind::PolygonMarker if other_kind == EndpointKind::PolygonMarker => {
                    diags.push(format!("edge {node}-{other}: two polygons are adjacent"));
                }
                _ => {}
            }
        }
    }
    diags.sort();
    diags.dedup();
    TreeReport {
        valid: diags.is_empty(),
        diagnostics: diags,
    }
}

/// A bipartition of the vertex set, both sides of size at least two.
pub type Split = (BTreeSet<u32>, BTreeSet<u32>);

/// All splits of a connected graph by exhaustive bipartition search.
/// Both sides of a returned split have at least two vertices and the
/// crossing edges form a complete bipartite graph. Guarded to 20 vertices.
pub fn find_splits(g: &SimpleGraph) -> Result<Vec<Split>, TreeError> {
    let verts: Vec<u32> = g.vertices().collect();
    let n = verts.len();
    if n > 20 {
        return Err(TreeError::SplitSizeGuard(n));
    }
    let mut out = Vec::new();
    if n < 4 {
        return Ok(out);
    }
    // fix verts[0] on side one so each bipartition is visited once
    for mask in 0u32..(1u32 << (n - 1)) {
        let mut side1 = BTreeSet::from([verts[0]]);
        for (i, &v) in verts.iter().enumerate().skip(1) {
            if mask & (1 << (i - 1)) != 0 {
                side1.insert(v);
            }
        }
        if side1.len() < 2 || n - side1.len() < 2 {
            continue;
        }
        let side2: BTreeSet<u32> = verts.iter().copied().filter(|v| !side1.contains(v)).collect();
        let mut boundary1 = BTreeSet::new();
        let mut boundary2 = BTreeSet::new();
        for &u in &side1 {
            for w in g.neighbors(u) {
                if side2.contains(&w) {
                    boundary1.insert(u);
                    boundary2.insert(w);
                }
            }
        }
        let complete = boundary1
            .iter()
            .all(|&u| boundary2.iter().all(|&w| g.contains_edge(u, w)));
        if complete {
            out.push((side1, side2));
        }
    }
    Ok(out)
}
