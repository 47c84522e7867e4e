//! Exact enumeration and uniform random generation of cactus graphs.
//!
//! The crate has three layers:
//!
//! * a symbolic layer — truncated exact power series ([`series`]), a small
//!   grammar DSL for decomposable combinatorial classes ([`grammar`]), the
//!   labeled/unlabeled counting engine ([`engine`]) and the built-in cactus
//!   family grammars ([`templates`]);
//! * a structural layer — simple graphs with optional plane embeddings
//!   ([`graph`]), graph-labeled trees, and the split-decomposition
//!   converters and validators for cacti ([`split_tree`]);
//! * generators and ground truth — exact-size uniform samplers ([`sampler`]),
//!   brute-force censuses and enumerators ([`oracle`]), and DOT/SVG export
//!   ([`dot`], [`svg`]).

pub mod dot;
pub mod engine;
pub mod grammar;
pub mod graph;
pub mod oracle;
pub mod sampler;
pub mod series;
pub mod split_tree;
pub mod svg;
pub mod templates;

pub use engine::{evaluate, SeriesEnvironment};
pub use grammar::{CardSpec, GrammarExpr, GrammarSystem, Mode, OmegaSpec, OperatorKind};
pub use graph::SimpleGraph;
pub use sampler::{RandomSource, Structure};
pub use series::{Coeff, PowerSeries};
pub use split_tree::GraphLabeledTree;
pub use templates::{Embedding, FamilySpec, Form, Rooting};
