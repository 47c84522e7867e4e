//! SVG rendering of cactus graphs: polygons drawn as regular polygons
//! hanging off their attachment vertices, subtrees fanned into angular
//! sectors sized by vertex count. Plane inputs keep their block order.

use crate::graph::{BlockKind, CactusDecomposition, GraphError, SimpleGraph};
use std::collections::BTreeMap;
use std::fmt::Write as _;

const EDGE_LENGTH: f64 = 34.0;

#[derive(Debug, Clone, Copy)]
struct Point {
    x: f64,
    y: f64,
}

/// Render a cactus as a standalone SVG document. The root (when given) is
/// highlighted. Fails on non-cactus input.
pub fn cactus_to_svg(g: &SimpleGraph, root: Option<u32>) -> Result<String, GraphError> {
    let mut positions: BTreeMap<u32, Point> = BTreeMap::new();
    if g.vertex_count() == 0 {
        return Err(GraphError::Disconnected);
    }
    let start = root
        .filter(|v| g.contains_vertex(*v))
        .unwrap_or_else(|| g.vertices().next().unwrap());
    if g.vertex_count() == 1 {
        positions.insert(start, Point { x: 0.0, y: 0.0 });
    } else {
        let decomp = g.cactus_decomposition()?;
        let membership = block_membership(&decomp);
        positions.insert(start, Point { x: 0.0, y: 0.0 });
        let blocks = blocks_at(g, &decomp, &membership, start);
        layout_vertex(
            g,
            &decomp,
            &membership,
            start,
            &blocks,
            0.0,
            std::f64::consts::TAU,
            &mut positions,
        );
    }

    let min_x = positions.values().map(|p| p.x).fold(f64::MAX, f64::min) - 2.0 * EDGE_LENGTH;
    let min_y = positions.values().map(|p| p.y).fold(f64::MAX, f64::min) - 2.0 * EDGE_LENGTH;
    let max_x = positions.values().map(|p| p.x).fold(f64::MIN, f64::max) + 2.0 * EDGE_LENGTH;
    let max_y = positions.values().map(|p| p.y).fold(f64::MIN, f64::max) + 2.0 * EDGE_LENGTH;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.1} {:.1} {:.1} {:.1}\">",
        min_x,
        min_y,
        max_x - min_x,
        max_y - min_y
    );
    for (u, v) in g.edges() {
        let (a, b) = (&positions[&u], &positions[&v]);
        let _ = writeln!(
            out,
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#2a6f4e\" stroke-width=\"2\"/>",
            a.x, a.y, b.x, b.y
        );
    }
    for (v, p) in &positions {
        let is_root = root == Some(*v);
        let (radius, fill) = if is_root {
            (6.0, "#d4442c")
        } else {
            (3.4, "#1e3d2f")
        };
        let _ = writeln!(
            out,
            "  <circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"{radius}\" fill=\"{fill}\"/>",
            p.x, p.y
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn block_membership(decomp: &CactusDecomposition) -> BTreeMap<u32, Vec<usize>> {
    let mut membership: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, b) in decomp.blocks.iter().enumerate() {
        for v in b.vertices() {
            membership.entry(v).or_default().push(i);
        }
    }
    membership
}

/// Blocks at a vertex, in rotation order when the graph is plane.
fn blocks_at(
    g: &SimpleGraph,
    decomp: &CactusDecomposition,
    membership: &BTreeMap<u32, Vec<usize>>,
    v: u32,
) -> Vec<usize> {
    let mut blocks: Vec<usize> = membership.get(&v).cloned().unwrap_or_default();
    if let Some(rot) = g.rotation_at(v) {
        let block_of = |w: u32| -> Option<usize> {
            blocks
                .iter()
                .copied()
                .find(|&b| decomp.blocks[b].contains(w) && decomp.blocks[b].contains(v))
        };
        let mut ordered = Vec::new();
        for &w in rot {
            if let Some(b) = block_of(w) {
                if !ordered.contains(&b) {
                    ordered.push(b);
                }
            }
        }
        if ordered.len() == blocks.len() {
            blocks = ordered;
        }
    }
    blocks
}

fn subtree_weight(
    decomp: &CactusDecomposition,
    membership: &BTreeMap<u32, Vec<usize>>,
    v: u32,
    via_block: usize,
) -> usize {
    // vertices beyond v through via_block
    let mut weight = 0;
    for w in decomp.blocks[via_block].vertices() {
        if w == v {
            continue;
        }
        weight += 1;
        for &b in membership.get(&w).into_iter().flatten() {
            if b != via_block {
                weight += subtree_weight(decomp, membership, w, b);
            }
        }
    }
    weight
}

#[allow(clippy::too_many_arguments)]
fn layout_vertex(
    g: &SimpleGraph,
    decomp: &CactusDecomposition,
    membership: &BTreeMap<u32, Vec<usize>>,
    v: u32,
    blocks: &[usize],
    angle_from: f64,
    angle_to: f64,
    positions: &mut BTreeMap<u32, Point>,
) {
    let weights: Vec<usize> = blocks
        .iter()
        .map(|&b| subtree_weight(decomp, membership, v, b).max(1))
        .collect();
    let total: usize = weights.iter().sum();
    if total == 0 {
        return;
    }
    let span = angle_to - angle_from;
    let mut cursor = angle_from;
    let origin = positions[&v];
    for (&b, &w) in blocks.iter().zip(&weights) {
        let slice = span * w as f64 / total as f64;
        let mid = cursor + slice / 2.0;
        match &decomp.blocks[b].kind {
            BlockKind::Edge(x, y) => {
                let other = if *x == v { *y } else { *x };
                let p = Point {
                    x: origin.x + EDGE_LENGTH * mid.cos(),
                    y: origin.y + EDGE_LENGTH * mid.sin(),
                };
                positions.insert(other, p);
                let rest = child_blocks(membership, other, b);
                layout_vertex(
                    g,
                    decomp,
                    membership,
                    other,
                    &rest,
                    mid - slice / 2.0,
                    mid + slice / 2.0,
                    positions,
                );
            }
            BlockKind::Cycle(vs) => {
                // regular polygon with one vertex at the origin, centered
                // outward along the mid angle
                let m = vs.len() as f64;
                let circumradius = EDGE_LENGTH / (2.0 * (std::f64::consts::PI / m).sin());
                let center = Point {
                    x: origin.x + circumradius * mid.cos(),
                    y: origin.y + circumradius * mid.sin(),
                };
                // walk the cycle starting at v
                let start = vs.iter().position(|&x| x == v).unwrap_or(0);
                let len = vs.len();
                for step in 1..len {
                    let w = vs[(start + step) % len];
                    let theta = mid + std::f64::consts::PI
                        - std::f64::consts::TAU * step as f64 / m;
                    let p = Point {
                        x: center.x + circumradius * theta.cos(),
                        y: center.y + circumradius * theta.sin(),
                    };
                    positions.insert(w, p);
                }
                for step in 1..len {
                    let w = vs[(start + step) % len];
                    let rest = child_blocks(membership, w, b);
                    if rest.is_empty() {
                        continue;
                    }
                    let outward = (positions[&w].y - center.y)
                        .atan2(positions[&w].x - center.x);
                    let sub_span =
                        slice / (len as f64 - 1.0);
                    layout_vertex(
                        g,
                        decomp,
                        membership,
                        w,
                        &rest,
                        outward - sub_span / 2.0,
                        outward + sub_span / 2.0,
                        positions,
                    );
                }
            }
        }
        cursor += slice;
    }
}

fn child_blocks(membership: &BTreeMap<u32, Vec<usize>>, v: u32, parent: usize) -> Vec<usize> {
    membership
        .get(&v)
        .into_iter()
        .flatten()
        .copied()
        .filter(|&b| b != parent)
        .collect()
}
