//! Finite simple graphs with optional plane embeddings (rotation systems),
//! biconnected blocks, cactus recognition, and the block/cluster structure
//! used by the split-decomposition converters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
    #[error("unknown vertex {0}")]
    UnknownVertex(u32),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not a cactus")]
    NotCactus,
    #[error("rotation at vertex {0} does not list its neighbors exactly once")]
    BadRotation(u32),
    #[error("edge list parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A simple graph over `u32` vertex ids. Vertex identity is preserved by
/// every operation in this crate; nothing ever renumbers silently.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleGraph {
    adj: BTreeMap<u32, BTreeSet<u32>>,
    rotation: Option<BTreeMap<u32, Vec<u32>>>,
}

impl SimpleGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: u32) {
        self.adj.entry(v).or_default();
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.adj.get(&u).is_some_and(|n| n.contains(&v)) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.adj.keys().copied()
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj.get(&v).map_or(0, |n| n.len())
    }

    pub fn contains_edge(&self, u: u32, v: u32) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    /// Edges as ordered pairs (u < v).
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (&u, nbrs) in &self.adj {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn rotation(&self) -> Option<&BTreeMap<u32, Vec<u32>>> {
        self.rotation.as_ref()
    }

    pub fn rotation_at(&self, v: u32) -> Option<&[u32]> {
        self.rotation.as_ref().and_then(|r| r.get(&v)).map(|v| v.as_slice())
    }

    /// Install a plane embedding: for each vertex, the cyclic order of its
    /// neighbors. Every vertex must list exactly its neighbor set.
    pub fn set_rotation(&mut self, rotation: BTreeMap<u32, Vec<u32>>) -> Result<(), GraphError> {
        for (&v, order) in &rotation {
            let nbrs = self.adj.get(&v).ok_or(GraphError::UnknownVertex(v))?;
            let as_set: BTreeSet<u32> = order.iter().copied().collect();
            if as_set != *nbrs || order.len() != nbrs.len() {
                return Err(GraphError::BadRotation(v));
            }
        }
        if rotation.len() != self.adj.len() {
            let missing = self
                .adj
                .keys()
                .find(|v| !rotation.contains_key(v))
                .copied()
                .unwrap_or(0);
            return Err(GraphError::BadRotation(missing));
        }
        self.rotation = Some(rotation);
        Ok(())
    }

    pub fn clear_rotation(&mut self) {
        self.rotation = None;
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.adj.keys().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.adj.len()
    }

    /// Identity comparison: same vertices, same edges, and (when both carry
    /// embeddings) the same rotation at every vertex up to cyclic shifts.
    pub fn same_graph(&self, other: &SimpleGraph) -> bool {
        if self.adj != other.adj {
            return false;
        }
        match (&self.rotation, &other.rotation) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                a.len() == b.len()
                    && a.iter().all(|(v, ra)| {
                        b.get(v).is_some_and(|rb| cyclically_equal(ra, rb))
                    })
            }
            _ => false,
        }
    }

    /// Biconnected components. Each block is returned as its vertex set plus
    /// edge list; bridges come out as two-vertex blocks.
    pub fn blocks(&self) -> Result<Vec<Block>, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let verts: Vec<u32> = self.vertices().collect();
        let index: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = verts.len();
        if n == 0 {
            return Ok(vec![]);
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut parent = vec![usize::MAX; n];
        let mut edge_stack: Vec<(u32, u32)> = Vec::new();
        let mut blocks = Vec::new();
        let mut timer = 0usize;

        // iterative DFS; each frame tracks its neighbor iterator position
        let mut frames: Vec<(usize, Vec<u32>, usize)> = Vec::new();
        let root = 0usize;
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        frames.push((root, self.neighbors(verts[root]).collect(), 0));
        while let Some((u, nbrs, pos)) = frames.last_mut() {
            let u = *u;
            if *pos < nbrs.len() {
                let wv = nbrs[*pos];
                *pos += 1;
                let w = index[&wv];
                if disc[w] == usize::MAX {
                    parent[w] = u;
                    edge_stack.push((verts[u], wv));
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    frames.push((w, self.neighbors(wv).collect(), 0));
                } else if w != parent[u] && disc[w] < disc[u] {
                    edge_stack.push((verts[u], wv));
                    low[u] = low[u].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some((p, _, _)) = frames.last() {
                    let p = *p;
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        // p closes a block together with the stacked edges
                        let mut edges = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            let last = e == (verts[p], verts[u]);
                            edges.push(e);
                            if last {
                                break;
                            }
                        }
                        blocks.push(Block::from_edges(edges));
                    }
                }
            }
        }
        Ok(blocks)
    }

    /// Cactus test: every block must be a single edge or a cycle. The
    /// offending block is returned as a certificate when the test fails.
    pub fn cactus_certificate(&self) -> Result<CactusVerdict, GraphError> {
        let blocks = self.blocks()?;
        for b in &blocks {
            if !b.is_edge() && !b.is_cycle() {
                return Ok(CactusVerdict {
                    is_cactus: false,
                    offending_block: Some(b.vertices.clone()),
                });
            }
        }
        Ok(CactusVerdict {
            is_cactus: true,
            offending_block: None,
        })
    }

    pub fn is_cactus(&self) -> Result<bool, GraphError> {
        Ok(self.cactus_certificate()?.is_cactus)
    }

    /// Block/cluster structure of a cactus: blocks with cycle orderings,
    /// clusters (one per vertex shared by at least two blocks), and
    /// external flags on both.
    pub fn cactus_decomposition(&self) -> Result<CactusDecomposition, GraphError> {
        let blocks = self.blocks()?;
        for b in &blocks {
            if !b.is_edge() && !b.is_cycle() {
                return Err(GraphError::NotCactus);
            }
        }
        let mut parts: Vec<CactusBlock> = blocks
            .iter()
            .map(|b| CactusBlock {
                kind: if b.is_edge() {
                    let mut it = b.vertices.iter();
                    BlockKind::Edge(*it.next().unwrap(), *it.next().unwrap())
                } else {
                    BlockKind::Cycle(b.cycle_order().expect("checked cycle"))
                },
                external: false,
            })
            .collect();
        // how many blocks each vertex belongs to
        let mut membership: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, b) in blocks.iter().enumerate() {
            for &v in &b.vertices {
                membership.entry(v).or_default().push(i);
            }
        }
        let cut_vertices: BTreeSet<u32> = membership
            .iter()
            .filter(|(_, bs)| bs.len() >= 2)
            .map(|(&v, _)| v)
            .collect();
        for (i, b) in blocks.iter().enumerate() {
            let shared: BTreeSet<u32> = b
                .vertices
                .iter()
                .copied()
                .filter(|v| cut_vertices.contains(v))
                .collect();
            // external = shares exactly one vertex with other blocks;
            // a lone block shares none and counts as external too
            parts[i].external = shared.len() <= 1;
        }
        let clusters: Vec<Cluster> = cut_vertices
            .iter()
            .map(|&v| {
                let block_ids = membership[&v].clone();
                let external = block_ids.iter().any(|&i| parts[i].external);
                Cluster {
                    vertex: v,
                    blocks: block_ids,
                    external,
                }
            })
            .collect();
        Ok(CactusDecomposition {
            blocks: parts,
            clusters,
        })
    }

    /// Serialize in the edge-list text format (`n m` header, one `u v` line
    /// per edge, optional `rot v: ...` lines). Vertices must be 1..=n.
    pub fn to_edge_list(&self) -> String {
        let n = self.vertex_count();
        let edges = self.edges();
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", n, edges.len());
        for (u, v) in &edges {
            let _ = writeln!(out, "{u} {v}");
        }
        if let Some(rot) = &self.rotation {
            for (v, order) in rot {
                if order.len() >= 2 {
                    let parts: Vec<String> = order.iter().map(|w| w.to_string()).collect();
                    let _ = writeln!(out, "rot {v}: {}", parts.join(" "));
                }
            }
        }
        out
    }

    /// Parse the edge-list format. Vertex ids must lie in 1..=n.
    pub fn from_edge_list(text: &str) -> Result<SimpleGraph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing 'n m' header".into(),
        })?;
        let mut head = header.split_whitespace();
        let parse_u32 = |s: Option<&str>, line: usize| -> Result<u32, GraphError> {
            s.and_then(|t| t.parse().ok()).ok_or(GraphError::Parse {
                line,
                message: "expected an integer".into(),
            })
        };
        let n = parse_u32(head.next(), line_no)?;
        let m = parse_u32(head.next(), line_no)?;
        let mut g = SimpleGraph::new();
        for v in 1..=n {
            g.add_vertex(v);
        }
        let mut rotation: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        let mut edges_seen = 0u32;
        for (line, text) in lines {
            if let Some(rest) = text.strip_prefix("rot ") {
                let (v_part, order_part) = rest.split_once(':').ok_or(GraphError::Parse {
                    line,
                    message: "rotation line needs 'rot v: ...'".into(),
                })?;
                let v = parse_u32(Some(v_part.trim()), line)?;
                let mut order = Vec::new();
                for tok in order_part.split_whitespace() {
                    order.push(parse_u32(Some(tok), line)?);
                }
                rotation.insert(v, order);
                continue;
            }
            let mut parts = text.split_whitespace();
            let u = parse_u32(parts.next(), line)?;
            let v = parse_u32(parts.next(), line)?;
            if u == 0 || u > n || v == 0 || v > n {
                return Err(GraphError::Parse {
                    line,
                    message: format!("vertex out of range 1..={n}"),
                });
            }
            g.add_edge(u, v).map_err(|e| GraphError::Parse {
                line,
                message: e.to_string(),
            })?;
            edges_seen += 1;
        }
        if edges_seen != m {
            return Err(GraphError::Parse {
                line: 1,
                message: format!("header declares {m} edges, found {edges_seen}"),
            });
        }
        if !rotation.is_empty() {
            // vertices without an explicit line get their sorted neighbor order
            for v in 1..=n {
                rotation
                    .entry(v)
                    .or_insert_with(|| g.neighbors(v).collect());
            }
            g.set_rotation(rotation)?;
        }
        Ok(g)
    }
}

pub fn cyclically_equal(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|shift| a.iter().cycle().skip(shift).take(a.len()).eq(b.iter()))
}

/// A biconnected component: vertex set plus its edges.
#[derive(Debug, Clone)]
pub struct Block {
    pub vertices: BTreeSet<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl Block {
    fn from_edges(edges: Vec<(u32, u32)>) -> Self {
        let mut vertices = BTreeSet::new();
        for &(u, v) in &edges {
            vertices.insert(u);
            vertices.insert(v);
        }
        Block { vertices, edges }
    }

    pub fn is_edge(&self) -> bool {
        self.edges.len() == 1
    }

    /// A block is a cycle iff it has as many edges as vertices and every
    /// vertex has degree 2 within the block.
    pub fn is_cycle(&self) -> bool {
        if self.edges.len() != self.vertices.len() || self.vertices.len() < 3 {
            return false;
        }
        let mut deg: BTreeMap<u32, usize> = BTreeMap::new();
        for &(u, v) in &self.edges {
            *deg.entry(u).or_default() += 1;
            *deg.entry(v).or_default() += 1;
        }
        deg.values().all(|&d| d == 2)
    }

    /// Vertices in cyclic order, starting from the smallest vertex and
    /// heading toward its smaller neighbor (a canonical representative).
    pub fn cycle_order(&self) -> Option<Vec<u32>> {
        if !self.is_cycle() {
            return None;
        }
        let mut nbrs: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &(u, v) in &self.edges {
            nbrs.entry(u).or_default().push(v);
            nbrs.entry(v).or_default().push(u);
        }
        for v in nbrs.values_mut() {
            v.sort_unstable();
        }
        let start = *self.vertices.iter().next().unwrap();
        let mut order = vec![start];
        let mut prev = start;
        let mut cur = nbrs[&start][0];
        while cur != start {
            order.push(cur);
            let next = if nbrs[&cur][0] == prev {
                nbrs[&cur][1]
            } else {
                nbrs[&cur][0]
            };
            prev = cur;
            cur = next;
        }
        Some(order)
    }
}

#[derive(Debug, Clone)]
pub struct CactusVerdict {
    pub is_cactus: bool,
    pub offending_block: Option<BTreeSet<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    Edge(u32, u32),
    /// Cycle vertices in cyclic order.
    Cycle(Vec<u32>),
}

#[derive(Debug, Clone)]
pub struct CactusBlock {
    pub kind: BlockKind,
    pub external: bool,
}

impl CactusBlock {
    pub fn vertices(&self) -> Vec<u32> {
        match &self.kind {
            BlockKind::Edge(u, v) => vec![*u, *v],
            BlockKind::Cycle(vs) => vs.clone(),
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        match &self.kind {
            BlockKind::Edge(a, b) => *a == v || *b == v,
            BlockKind::Cycle(vs) => vs.contains(&v),
        }
    }
}

/// A cluster: all blocks sharing one cut vertex.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub vertex: u32,
    pub blocks: Vec<usize>,
    pub external: bool,
}

#[derive(Debug, Clone)]
pub struct CactusDecomposition {
    pub blocks: Vec<CactusBlock>,
    pub clusters: Vec<Cluster>,
}
