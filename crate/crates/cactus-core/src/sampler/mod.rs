//! Exact-size uniform random generation of cacti by the recursive method,
//! driven by integer counting tables, plus structure-to-graph realization.

mod labeled;
mod plane;
mod rng;
mod structure;

pub use labeled::LabeledFreeRootedSampler;
pub use plane::PlaneRootedSampler;
pub use rng::{RandomSource, RNG_ALGORITHM};
pub use structure::Structure;

use crate::grammar::{OmegaSpec, OperatorKind};
use crate::graph::{GraphError, SimpleGraph};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("no object of size {size} exists in this family{}", format_nearest(nearest))]
    Unrealizable { size: usize, nearest: Vec<usize> },
    #[error("counting tables reach order {have} but size {need} was requested")]
    OrderTooSmall { have: usize, need: usize },
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error("internal sampler invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn format_nearest(nearest: &[usize]) -> String {
    if nearest.is_empty() {
        String::new()
    } else {
        let parts: Vec<String> = nearest.iter().map(|n| n.to_string()).collect();
        format!(" (nearest realizable sizes: {})", parts.join(", "))
    }
}

/// One uniform unlabeled plane rooted cactus of size `n` with cycle sizes in
/// Ω. Builds tables to order `n`; batch callers should hold a
/// [`PlaneRootedSampler`] instead.
pub fn sample_plane_rooted(
    omega: &OmegaSpec,
    n: usize,
    rng: &mut RandomSource,
) -> Result<Structure, SampleError> {
    PlaneRootedSampler::build(omega.clone(), n)?.sample(n, rng)
}

/// One uniform labeled free rooted cactus on labels 1..=n.
pub fn sample_labeled_free_rooted(
    omega: &OmegaSpec,
    n: usize,
    rng: &mut RandomSource,
) -> Result<Structure, SampleError> {
    LabeledFreeRootedSampler::build(omega.clone(), n)?.sample(n, rng)
}

/// Realize a sampled structure as a graph. Plane structures (cyclic root
/// arrangement, Seq polygons) get a rotation system; free ones do not.
/// Unlabeled atoms receive vertex ids 1..=n in traversal order, labeled
/// atoms keep their labels. Vertex 1 / the root atom's label is the root.
pub fn structure_to_graph(structure: &Structure) -> Result<SimpleGraph, SampleError> {
    let Structure::Tuple(parts) = structure else {
        return Err(SampleError::Malformed(
            "expected a (root, polygons) tuple".into(),
        ));
    };
    let [root_atom, Structure::Node { op, children }] = parts.as_slice() else {
        return Err(SampleError::Malformed(
            "expected a (root, polygons) tuple".into(),
        ));
    };
    let plane = match op {
        OperatorKind::Cyc => true,
        OperatorKind::Set => false,
        other => {
            return Err(SampleError::Malformed(format!(
                "root arrangement must be Cyc or Set, found {other}"
            )))
        }
    };
    let mut builder = GraphBuilder {
        graph: SimpleGraph::new(),
        rotation: BTreeMap::new(),
        plane,
        next_id: 1,
    };
    let root = builder.vertex_of(root_atom)?;
    let mut entries = Vec::new();
    for poly in children {
        entries.extend(builder.attach_polygon(root, poly)?);
    }
    builder.rotation.insert(root, entries);
    builder.finish()
}

struct GraphBuilder {
    graph: SimpleGraph,
    rotation: BTreeMap<u32, Vec<u32>>,
    plane: bool,
    next_id: u32,
}

impl GraphBuilder {
    fn vertex_of(&mut self, atom: &Structure) -> Result<u32, SampleError> {
        let id = match atom {
            Structure::Atom(Some(label)) => *label,
            Structure::Atom(None) => {
                let id = self.next_id;
                self.next_id += 1;
                id
            }
            other => {
                return Err(SampleError::Malformed(format!(
                    "expected an atom, found {other}"
                )))
            }
        };
        if self.graph.contains_vertex(id) {
            return Err(SampleError::Malformed(format!(
                "duplicate vertex label {id}"
            )));
        }
        self.graph.add_vertex(id);
        Ok(id)
    }

    /// Attach one polygon (a Seq or USeq of vertex components) to `parent`,
    /// closing the cycle through it. A single-component polygon is a 2-gon,
    /// i.e. a bridge. Returns the parent's rotation entries for this block:
    /// the cycle successor and predecessor, or just the bridge neighbor.
    fn attach_polygon(
        &mut self,
        parent: u32,
        poly: &Structure,
    ) -> Result<Vec<u32>, SampleError> {
        let Structure::Node { op, children } = poly else {
            return Err(SampleError::Malformed(format!(
                "expected a polygon node, found {poly}"
            )));
        };
        if !matches!(op, OperatorKind::Seq | OperatorKind::USeq) {
            return Err(SampleError::Malformed(format!(
                "polygon must be Seq or USeq, found {op}"
            )));
        }
        if children.is_empty() {
            return Err(SampleError::Malformed("empty polygon".into()));
        }
        // vertex components are atoms or (atom, polygon-list) tuples
        let mut ids = Vec::with_capacity(children.len());
        let mut hangs: Vec<&[Structure]> = Vec::with_capacity(children.len());
        for comp in children {
            match comp {
                Structure::Atom(_) => {
                    ids.push(self.vertex_of(comp)?);
                    hangs.push(&[]);
                }
                Structure::Tuple(parts) => {
                    let [atom, Structure::Node { op, children }] = parts.as_slice() else {
                        return Err(SampleError::Malformed(
                            "vertex component must be (atom, polygons)".into(),
                        ));
                    };
                    if !matches!(op, OperatorKind::Seq | OperatorKind::Set) {
                        return Err(SampleError::Malformed(format!(
                            "hanging arrangement must be Seq or Set, found {op}"
                        )));
                    }
                    ids.push(self.vertex_of(atom)?);
                    hangs.push(children.as_slice());
                }
                other => {
                    return Err(SampleError::Malformed(format!(
                        "unexpected vertex component {other}"
                    )))
                }
            }
        }
        let len = ids.len();
        self.graph.add_edge(parent, ids[0])?;
        for i in 0..len - 1 {
            self.graph.add_edge(ids[i], ids[i + 1])?;
        }
        if len > 1 {
            self.graph.add_edge(ids[len - 1], parent)?;
        }
        for (i, (&v, polys)) in ids.iter().zip(&hangs).enumerate() {
            let mut entries = Vec::new();
            if len > 1 {
                entries.push(if i == 0 { parent } else { ids[i - 1] });
            } else {
                entries.push(parent);
            }
            for poly in *polys {
                entries.extend(self.attach_polygon(v, poly)?);
            }
            if len > 1 {
                entries.push(if i + 1 == len { parent } else { ids[i + 1] });
            }
            self.rotation.insert(v, entries);
        }
        Ok(if len > 1 {
            vec![ids[0], ids[len - 1]]
        } else {
            vec![ids[0]]
        })
    }

    fn finish(mut self) -> Result<SimpleGraph, SampleError> {
        if self.plane {
            let rotation = std::mem::take(&mut self.rotation);
            self.graph.set_rotation(rotation)?;
        }
        Ok(self.graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::OmegaSpec;

    #[test]
    fn pentagon_structure_realizes_as_c5() {
        let omega = OmegaSpec::finite([5]).unwrap();
        let mut rng = RandomSource::new(2);
        let s = sample_plane_rooted(&omega, 5, &mut rng).unwrap();
        let g = structure_to_graph(&s).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 5);
        assert!(g.is_cactus().unwrap());
        assert!(g.rotation().is_some());
        assert!(g.vertices().all(|v| g.degree(v) == 2));
    }

    #[test]
    fn plane_samples_are_cacti_with_cycles_in_omega() {
        let omega = OmegaSpec::at_least(4).unwrap();
        let sampler = PlaneRootedSampler::build(omega, 40).unwrap();
        let mut rng = RandomSource::new(99);
        for n in [10usize, 21, 33, 40] {
            let s = sampler.sample(n, &mut rng).unwrap();
            assert_eq!(s.size(), n);
            let g = structure_to_graph(&s).unwrap();
            assert_eq!(g.vertex_count(), n);
            let decomp = g.cactus_decomposition().unwrap();
            for block in &decomp.blocks {
                match &block.kind {
                    crate::graph::BlockKind::Cycle(vs) => assert!(vs.len() >= 4),
                    crate::graph::BlockKind::Edge(..) => panic!("bridge with omega >= 4"),
                }
            }
        }
    }

    #[test]
    fn labeled_samples_carry_permutation_labels() {
        let omega = OmegaSpec::at_least(2).unwrap();
        let sampler = LabeledFreeRootedSampler::build(omega, 12).unwrap();
        let mut rng = RandomSource::new(7);
        for n in [2usize, 5, 9, 12] {
            let s = sampler.sample(n, &mut rng).unwrap();
            let g = structure_to_graph(&s).unwrap();
            assert_eq!(g.vertex_count(), n);
            assert!(g.is_cactus().unwrap());
            assert!(g.rotation().is_none());
            let mut labels: Vec<u32> = g.vertices().collect();
            labels.sort_unstable();
            assert_eq!(labels, (1..=n as u32).collect::<Vec<_>>());
        }
    }

    #[test]
    fn plane_rotation_round_trips_through_split_tree() {
        use crate::split_tree::{cactus_to_split_tree, split_tree_to_cactus, TreeForm};
        let omega = OmegaSpec::at_least(3).unwrap();
        let sampler = PlaneRootedSampler::build(omega, 30).unwrap();
        let mut rng = RandomSource::new(424242);
        for n in [7usize, 13, 20, 30] {
            let g = structure_to_graph(&sampler.sample(n, &mut rng).unwrap()).unwrap();
            for form in [TreeForm::Reduced, TreeForm::Simplified] {
                let t = cactus_to_split_tree(&g, form).unwrap();
                let back = split_tree_to_cactus(&t).unwrap();
                assert!(back.same_graph(&g), "n={n} {form}");
            }
        }
    }
}
