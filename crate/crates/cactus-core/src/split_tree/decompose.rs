//! Cactus graph <-> split-decomposition tree conversions.
//!
//! The construction realizes the block/cluster picture directly: every cut
//! vertex becomes a star node (center on the vertex's leaf, one extremity
//! per incident block), every cycle block a polygon node, and every bridge a
//! direct tree edge between its endpoint attachments. In reduced form a
//! 4-cycle becomes the star pair with joined centers; in simplified form it
//! stays a polygon like any other cycle.
//!
//! Plane inputs carry a rotation system. Orientation conventions:
//! walking a cycle, the rotation run of a block at a vertex lists the edge
//! to the cycle successor immediately before the edge to the predecessor;
//! for a 4-cycle star pair, the earlier-created star holds the even walk
//! positions, so `next` maps its extremity i to extremity i of the partner.

use super::{
    validate_reduced_cactus_tree, validate_simplified_cactus_tree, GraphLabeledTree, NodeId,
    NodeLabel, TreeError, TreeNode,
};
use crate::graph::{BlockKind, SimpleGraph};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeForm {
    Reduced,
    Simplified,
}

impl std::fmt::Display for TreeForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TreeForm::Reduced => write!(f, "reduced"),
            TreeForm::Simplified => write!(f, "simplified"),
        }
    }
}

/// Attachment point for one (vertex, block) incidence.
#[derive(Debug, Clone, Copy)]
enum Att {
    Leaf(NodeId),
    StarExt(NodeId, usize),
}

impl Att {
    fn parts(self) -> (NodeId, usize) {
        match self {
            Att::Leaf(n) => (n, 0),
            Att::StarExt(n, m) => (n, m),
        }
    }
}

pub fn cactus_to_split_tree(
    g: &SimpleGraph,
    form: TreeForm,
) -> Result<GraphLabeledTree, TreeError> {
    let cert = g.cactus_certificate()?;
    if !cert.is_cactus {
        return Err(TreeError::NotCactus {
            block: cert
                .offending_block
                .map(|b| b.into_iter().collect())
                .unwrap_or_default(),
        });
    }
    let plane = g.rotation().is_some();
    let mut tree = GraphLabeledTree::new(plane);
    if g.vertex_count() == 0 {
        return Err(TreeError::NotATree);
    }
    if g.vertex_count() == 1 {
        tree.add_leaf(g.vertices().next().unwrap());
        return Ok(tree);
    }

    let decomp = g.cactus_decomposition()?;
    // orient every cycle block once, consistently with the rotation system
    let oriented: Vec<BlockKind> = decomp
        .blocks
        .iter()
        .map(|b| match &b.kind {
            BlockKind::Edge(u, v) => Ok(BlockKind::Edge(*u, *v)),
            BlockKind::Cycle(vs) => Ok(BlockKind::Cycle(orient_cycle(g, vs, plane)?)),
        })
        .collect::<Result<_, TreeError>>()?;

    let mut leaf_id: BTreeMap<u32, NodeId> = BTreeMap::new();
    for v in g.vertices() {
        leaf_id.insert(v, tree.add_leaf(v));
    }

    // block id -> position lookup for cluster ordering
    let mut att: BTreeMap<(u32, usize), Att> = BTreeMap::new();
    for cluster in &decomp.clusters {
        let v = cluster.vertex;
        let order = cluster_block_order(g, v, &cluster.blocks, &oriented, plane)?;
        let star = tree.add_internal(NodeLabel::Star {
            extremities: order.len(),
        });
        tree.connect(star, 0, leaf_id[&v], 0)?;
        for (i, &block) in order.iter().enumerate() {
            att.insert((v, block), Att::StarExt(star, i + 1));
        }
    }
    let att_of = |att: &BTreeMap<(u32, usize), Att>, v: u32, block: usize| -> Att {
        att.get(&(v, block)).copied().unwrap_or(Att::Leaf(leaf_id[&v]))
    };

    for (bi, kind) in oriented.iter().enumerate() {
        match kind {
            BlockKind::Edge(u, w) => {
                let au = att_of(&att, *u, bi);
                let aw = att_of(&att, *w, bi);
                if form == TreeForm::Simplified {
                    if let (Att::StarExt(..), Att::StarExt(..)) = (au, aw) {
                        return Err(TreeError::SimplifiedFormUnavailable { u: *u, v: *w });
                    }
                }
                let (nu, mu) = au.parts();
                let (nw, mw) = aw.parts();
                tree.connect(nu, mu, nw, mw)?;
            }
            BlockKind::Cycle(vs) => {
                let len = vs.len();
                if form == TreeForm::Reduced && len == 4 {
                    // star pair with joined centers; the first star takes the
                    // even walk positions
                    let s1 = tree.add_internal(NodeLabel::Star { extremities: 2 });
                    let s2 = tree.add_internal(NodeLabel::Star { extremities: 2 });
                    tree.connect(s1, 0, s2, 0)?;
                    for (pos, &(star, marker)) in
                        [(s1, 1), (s2, 1), (s1, 2), (s2, 2)].iter().enumerate()
                    {
                        let (n, m) = att_of(&att, vs[pos], bi).parts();
                        tree.connect(star, marker, n, m)?;
                    }
                } else {
                    let poly = tree.add_internal(NodeLabel::Cycle { size: len });
                    for (i, &v) in vs.iter().enumerate() {
                        let (n, m) = att_of(&att, v, bi).parts();
                        tree.connect(poly, i, n, m)?;
                    }
                }
            }
        }
    }

    tree.validate_structure()?;
    Ok(tree)
}

/// Pick the walk direction of a cycle that matches the rotation system:
/// at every vertex of degree >= 3 the edge to the successor must sit
/// immediately before the edge to the predecessor in the rotation.
fn orient_cycle(g: &SimpleGraph, vs: &[u32], plane: bool) -> Result<Vec<u32>, TreeError> {
    if !plane {
        return Ok(vs.to_vec());
    }
    let consistent = |walk: &[u32]| -> Result<bool, u32> {
        let len = walk.len();
        for (i, &v) in walk.iter().enumerate() {
            if g.degree(v) < 3 {
                continue;
            }
            let rot = g.rotation_at(v).expect("plane graph has rotations");
            let next = walk[(i + 1) % len];
            let prev = walk[(i + len - 1) % len];
            let pos = |w: u32| rot.iter().position(|&x| x == w);
            match (pos(next), pos(prev)) {
                (Some(pn), Some(pp)) => {
                    if (pn + 1) % rot.len() != pp {
                        return Err(v);
                    }
                }
                _ => return Err(v),
            }
        }
        Ok(true)
    };
    if consistent(vs).is_ok() {
        return Ok(vs.to_vec());
    }
    // reverse the walk, keeping the anchor vertex first
    let mut rev = vs.to_vec();
    rev[1..].reverse();
    match consistent(&rev) {
        Ok(_) => Ok(rev),
        Err(v) => Err(TreeError::NonPlanarRotation { vertex: v }),
    }
}

/// Blocks of a cluster in attachment order: rotation-run order for plane
/// graphs, ascending smallest-other-vertex otherwise.
fn cluster_block_order(
    g: &SimpleGraph,
    v: u32,
    blocks: &[usize],
    oriented: &[BlockKind],
    plane: bool,
) -> Result<Vec<usize>, TreeError> {
    if !plane {
        let mut order = blocks.to_vec();
        order.sort_by_key(|&b| {
            oriented[b]
                .vertices_ref()
                .iter()
                .copied()
                .filter(|&w| w != v)
                .min()
                .unwrap_or(u32::MAX)
        });
        return Ok(order);
    }
    let rot = g
        .rotation_at(v)
        .ok_or(TreeError::NonPlanarRotation { vertex: v })?;
    // map each incident edge to its block
    let block_of_edge = |w: u32| -> Option<usize> {
        blocks.iter().copied().find(|&b| match &oriented[b] {
            BlockKind::Edge(x, y) => (*x == v && *y == w) || (*y == v && *x == w),
            BlockKind::Cycle(vs) => {
                let len = vs.len();
                vs.iter().enumerate().any(|(i, &x)| {
                    x == v && (vs[(i + 1) % len] == w || vs[(i + len - 1) % len] == w)
                })
            }
        })
    };
    let mut order: Vec<usize> = Vec::new();
    for &w in rot {
        let b = block_of_edge(w).ok_or(TreeError::NonPlanarRotation { vertex: v })?;
        if !order.contains(&b) {
            order.push(b);
        }
    }
    if order.len() != blocks.len() {
        return Err(TreeError::NonPlanarRotation { vertex: v });
    }
    Ok(order)
}

impl BlockKind {
    fn vertices_ref(&self) -> Vec<u32> {
        match self {
            BlockKind::Edge(u, v) => vec![*u, *v],
            BlockKind::Cycle(vs) => vs.clone(),
        }
    }
}

/// Rebuild the original cactus from a split tree of either form. The tree is
/// validated first; plane trees also get their rotation system back.
pub fn split_tree_to_cactus(tree: &GraphLabeledTree) -> Result<SimpleGraph, TreeError> {
    tree.validate_structure()?;
    let reduced = validate_reduced_cactus_tree(tree);
    let simplified = validate_simplified_cactus_tree(tree);
    if !reduced.valid && !simplified.valid {
        let report = if reduced.diagnostics.len() <= simplified.diagnostics.len() {
            reduced
        } else {
            simplified
        };
        return Err(TreeError::InvalidTree(report.diagnostics.join("; ")));
    }
    let mut g = tree.accessibility()?;
    let cert = g.cactus_certificate()?;
    if !cert.is_cactus {
        return Err(TreeError::NotCactus {
            block: cert
                .offending_block
                .map(|b| b.into_iter().collect())
                .unwrap_or_default(),
        });
    }
    if tree.plane {
        let rotation = reconstruct_rotation(tree)?;
        g.set_rotation(rotation)?;
    }
    Ok(g)
}

/// Is this star half of a 4-cycle gadget (its center joined to a center)?
fn is_gadget_star(tree: &GraphLabeledTree, star: NodeId) -> bool {
    match tree.neighbor_at_marker(star, 0) {
        Some(nb) => matches!(
            (tree.node(nb), tree.marker_of(nb, star)),
            (Some(TreeNode::Internal { label }), Some(0)) if label.is_star()
        ),
        None => false,
    }
}

/// Graph vertex of the leaf on a cluster star's center.
fn center_vertex(tree: &GraphLabeledTree, star: NodeId) -> Result<u32, TreeError> {
    let nb = tree
        .neighbor_at_marker(star, 0)
        .ok_or(TreeError::InvalidTree("star center unattached".into()))?;
    tree.leaf_vertex(nb)
        .ok_or_else(|| TreeError::InvalidTree("star center not on a leaf".into()))
}

/// The graph vertex sitting directly at an attachment point: a leaf's
/// vertex, or the center vertex of the cluster star attached there.
fn attached_vertex(tree: &GraphLabeledTree, node: NodeId, marker: usize) -> Result<u32, TreeError> {
    let nb = tree
        .neighbor_at_marker(node, marker)
        .ok_or(TreeError::InvalidTree("unattached marker".into()))?;
    match tree.node(nb) {
        Some(TreeNode::Leaf { vertex }) => Ok(*vertex),
        Some(TreeNode::Internal { label }) if label.is_star() => {
            if is_gadget_star(tree, nb) {
                return Err(TreeError::InvalidTree(
                    "attachment resolves to a 4-cycle gadget".into(),
                ));
            }
            center_vertex(tree, nb)
        }
        _ => Err(TreeError::InvalidTree(
            "attachment resolves to a polygon".into(),
        )),
    }
}

/// The `(successor, predecessor)` vertex pair around a cycle for the vertex
/// attached at `marker` of polygon `poly`.
fn polygon_pair(
    tree: &GraphLabeledTree,
    poly: NodeId,
    marker: usize,
) -> Result<(u32, u32), TreeError> {
    let size = tree
        .label(poly)
        .and_then(|l| l.polygon_size())
        .ok_or(TreeError::InvalidTree("expected polygon".into()))?;
    let next = attached_vertex(tree, poly, (marker + 1) % size)?;
    let prev = attached_vertex(tree, poly, (marker + size - 1) % size)?;
    Ok((next, prev))
}

/// The `(successor, predecessor)` pair for a vertex on a 4-cycle star pair,
/// seen from extremity `marker` of star `half`.
fn gadget_pair(
    tree: &GraphLabeledTree,
    half: NodeId,
    marker: usize,
) -> Result<(u32, u32), TreeError> {
    let partner = tree
        .neighbor_at_marker(half, 0)
        .ok_or(TreeError::InvalidTree("gadget star has no partner".into()))?;
    // the earlier-created star holds walk positions 0 and 2
    let (next_marker, prev_marker) = if half < partner {
        (marker, 3 - marker)
    } else {
        (3 - marker, marker)
    };
    let next = attached_vertex(tree, partner, next_marker)?;
    let prev = attached_vertex(tree, partner, prev_marker)?;
    Ok((next, prev))
}

/// Rotation entries contributed by the block hanging off one attachment
/// point (a cluster-star extremity, or a lone vertex's single block).
fn block_entries(
    tree: &GraphLabeledTree,
    node: NodeId,
    marker: usize,
) -> Result<Vec<u32>, TreeError> {
    let nb = tree
        .neighbor_at_marker(node, marker)
        .ok_or(TreeError::InvalidTree("unattached marker".into()))?;
    let nb_marker = tree.marker_of(nb, node).unwrap();
    match tree.node(nb) {
        Some(TreeNode::Leaf { vertex }) => Ok(vec![*vertex]),
        Some(TreeNode::Internal { label }) => {
            if label.polygon_size().is_some() {
                let (next, prev) = polygon_pair(tree, nb, nb_marker)?;
                Ok(vec![next, prev])
            } else if label.is_star() && is_gadget_star(tree, nb) {
                let (next, prev) = gadget_pair(tree, nb, nb_marker)?;
                Ok(vec![next, prev])
            } else if label.is_star() {
                // bridge to another cut vertex
                Ok(vec![center_vertex(tree, nb)?])
            } else {
                Err(TreeError::InvalidTree("unexpected label".into()))
            }
        }
        None => Err(TreeError::UnknownNode(nb)),
    }
}

/// Recover the rotation system of the accessibility graph of a plane tree.
fn reconstruct_rotation(
    tree: &GraphLabeledTree,
) -> Result<BTreeMap<u32, Vec<u32>>, TreeError> {
    let mut rotation = BTreeMap::new();
    for (leaf, vertex) in tree.leaves() {
        let entries = if tree.node_count() == 1 {
            Vec::new()
        } else {
            let nb = tree.neighbors(leaf).next().ok_or(TreeError::NotATree)?;
            let nb_marker = tree.marker_of(nb, leaf).unwrap();
            match tree.node(nb) {
                Some(TreeNode::Leaf { vertex: w }) => vec![*w],
                Some(TreeNode::Internal { label }) => {
                    if label.polygon_size().is_some() {
                        let (next, prev) = polygon_pair(tree, nb, nb_marker)?;
                        vec![next, prev]
                    } else if label.is_star() && nb_marker == 0 {
                        // cut vertex: one block per extremity, in order
                        let mut all = Vec::new();
                        for ext in 1..=tree.degree(nb) - 1 {
                            all.extend(block_entries(tree, nb, ext)?);
                        }
                        all
                    } else if label.is_star() && is_gadget_star(tree, nb) {
                        let (next, prev) = gadget_pair(tree, nb, nb_marker)?;
                        vec![next, prev]
                    } else if label.is_star() {
                        // pendant vertex across a bridge from a cut vertex
                        vec![center_vertex(tree, nb)?]
                    } else {
                        return Err(TreeError::InvalidTree("unexpected label".into()));
                    }
                }
                None => return Err(TreeError::UnknownNode(nb)),
            }
        };
        // dedupe: a length-2 cycle pair on a triangle lists the same
        // neighbor twice only when the cycle has length 2, which cannot
        // happen; keep entries as computed
        rotation.insert(vertex, entries);
    }
    Ok(rotation)
}

/// Convert between the reduced and simplified forms: 4-cycle star pairs
/// merge into cycle-4 polygon nodes and back; everything else is copied.
pub fn convert_form(
    tree: &GraphLabeledTree,
    target: TreeForm,
) -> Result<GraphLabeledTree, TreeError> {
    tree.validate_structure()?;
    match target {
        TreeForm::Simplified => merge_star_pairs(tree),
        TreeForm::Reduced => expand_c4_polygons(tree),
    }
}

fn merge_star_pairs(tree: &GraphLabeledTree) -> Result<GraphLabeledTree, TreeError> {
    // find center-center pairs where both stars have exactly two extremities
    let mut partner: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (id, node) in tree.nodes() {
        let TreeNode::Internal { label } = node else {
            continue;
        };
        if !matches!(label, NodeLabel::Star { extremities: 2 }) {
            continue;
        }
        let Some(nb) = tree.neighbor_at_marker(id, 0) else {
            continue;
        };
        if tree.marker_of(nb, id) == Some(0)
            && matches!(tree.label(nb), Some(NodeLabel::Star { extremities: 2 }))
        {
            partner.insert(id, nb);
        }
    }

    let mut out = GraphLabeledTree::new(tree.plane);
    // old node -> (new node, marker translation offset rule)
    let mut new_id: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (id, node) in tree.nodes() {
        if let Some(&p) = partner.get(&id) {
            if p < id {
                continue; // the smaller partner creates the shared polygon
            }
            let c4 = out.add_internal(NodeLabel::Cycle { size: 4 });
            new_id.insert(id, c4);
            new_id.insert(p, c4);
            continue;
        }
        let copy = match node {
            TreeNode::Leaf { vertex } => out.add_leaf(*vertex),
            TreeNode::Internal { label } => out.add_internal(label.clone()),
        };
        new_id.insert(id, copy);
    }
    // marker translation: smaller star's extremities 1,2 -> polygon 0,2;
    // larger star's extremities 1,2 -> polygon 1,3
    let translate = |node: NodeId, marker: usize| -> (NodeId, usize) {
        match partner.get(&node) {
            Some(&p) => {
                let m = if node < p {
                    match marker {
                        1 => 0,
                        _ => 2,
                    }
                } else {
                    match marker {
                        1 => 1,
                        _ => 3,
                    }
                };
                (new_id[&node], m)
            }
            None => (new_id[&node], marker),
        }
    };
    for (a, b) in tree.edges() {
        // skip the internal center-center edge of each merged pair
        if partner.get(&a) == Some(&b) {
            continue;
        }
        let ma = tree.marker_of(a, b).unwrap();
        let mb = tree.marker_of(b, a).unwrap();
        let (na, ta) = translate(a, ma);
        let (nb, tb) = translate(b, mb);
        out.connect(na, ta, nb, tb)?;
    }
    out.validate_structure()?;
    Ok(out)
}


fn expand_c4_polygons(tree: &GraphLabeledTree) -> Result<GraphLabeledTree, TreeError> {
    let mut out = GraphLabeledTree::new(tree.plane);
    let mut first_half: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut second_half: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut new_id: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (id, node) in tree.nodes() {
        match node {
            TreeNode::Internal { label: NodeLabel::Cycle { size: 4 } } => {
                let s1 = out.add_internal(NodeLabel::Star { extremities: 2 });
                first_half.insert(id, s1);
            }
            TreeNode::Leaf { vertex } => {
                new_id.insert(id, out.add_leaf(*vertex));
            }
            TreeNode::Internal { label } => {
                new_id.insert(id, out.add_internal(label.clone()));
            }
        }
    }
    for (&old, &s1) in &first_half {
        let s2 = out.add_internal(NodeLabel::Star { extremities: 2 });
        second_half.insert(old, s2);
        out.connect(s1, 0, s2, 0)?;
    }
    let translate = |node: NodeId, marker: usize| -> (NodeId, usize) {
        match first_half.get(&node) {
            Some(&s1) => match marker {
                0 => (s1, 1),
                2 => (s1, 2),
                1 => (second_half[&node], 1),
                _ => (second_half[&node], 2),
            },
            None => (new_id[&node], marker),
        }
    };
    for (a, b) in tree.edges() {
        let ma = tree.marker_of(a, b).unwrap();
        let mb = tree.marker_of(b, a).unwrap();
        let (na, ta) = translate(a, ma);
        let (nb, tb) = translate(b, mb);
        out.connect(na, ta, nb, tb)?;
    }
    out.validate_structure()?;
    Ok(out)
}
