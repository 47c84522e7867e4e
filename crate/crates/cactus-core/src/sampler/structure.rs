//! Term trees for sampled and enumerated grammar objects.

use crate::grammar::OperatorKind;
use std::fmt;

/// One object of a combinatorial class: an atom (optionally labeled), a
/// product tuple, or an operator node with its component list. The stored
/// child order of a cycle is its rotation representative; `canonical`
/// quotients that representative away for comparisons.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Structure {
    Atom(Option<u32>),
    Tuple(Vec<Structure>),
    Node {
        op: OperatorKind,
        children: Vec<Structure>,
    },
}

impl Structure {
    pub fn atom() -> Self {
        Structure::Atom(None)
    }

    pub fn labeled_atom(label: u32) -> Self {
        Structure::Atom(Some(label))
    }

    /// Number of atoms.
    pub fn size(&self) -> usize {
        match self {
            Structure::Atom(_) => 1,
            Structure::Tuple(parts) => parts.iter().map(Structure::size).sum(),
            Structure::Node { children, .. } => children.iter().map(Structure::size).sum(),
        }
    }

    /// All atom labels in depth-first order.
    pub fn labels(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut Vec<u32>) {
        match self {
            Structure::Atom(Some(l)) => out.push(*l),
            Structure::Atom(None) => {}
            Structure::Tuple(parts) => parts.iter().for_each(|p| p.collect_labels(out)),
            Structure::Node { children, .. } => {
                children.iter().for_each(|c| c.collect_labels(out))
            }
        }
    }

    /// Canonical representative: cycles rotate to their least phase,
    /// undirected operators also consider the reversal, sets sort.
    pub fn canonical(&self) -> Structure {
        match self {
            Structure::Atom(l) => Structure::Atom(*l),
            Structure::Tuple(parts) => {
                Structure::Tuple(parts.iter().map(Structure::canonical).collect())
            }
            Structure::Node { op, children } => {
                let mut kids: Vec<Structure> =
                    children.iter().map(Structure::canonical).collect();
                match op {
                    OperatorKind::Seq => {}
                    OperatorKind::Set => kids.sort(),
                    OperatorKind::Cyc => kids = min_rotation(kids),
                    OperatorKind::USeq => {
                        let mut rev = kids.clone();
                        rev.reverse();
                        if rev < kids {
                            kids = rev;
                        }
                    }
                    OperatorKind::UCyc => {
                        let fwd = min_rotation(kids.clone());
                        let mut rev = kids.clone();
                        rev.reverse();
                        let rev = min_rotation(rev);
                        kids = fwd.min(rev);
                    }
                }
                Structure::Node {
                    op: *op,
                    children: kids,
                }
            }
        }
    }
}

fn min_rotation(items: Vec<Structure>) -> Vec<Structure> {
    if items.len() <= 1 {
        return items;
    }
    let n = items.len();
    let mut best: Option<Vec<Structure>> = None;
    for shift in 0..n {
        let rotated: Vec<Structure> = (0..n).map(|i| items[(i + shift) % n].clone()).collect();
        if best.as_ref().is_none_or(|b| rotated < *b) {
            best = Some(rotated);
        }
    }
    best.unwrap()
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Atom(None) => write!(f, "Z"),
            Structure::Atom(Some(l)) => write!(f, "Z#{l}"),
            Structure::Tuple(parts) => {
                write!(f, "(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            Structure::Node { op, children } => {
                write!(f, "{}[", op.name())?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    }
}
