//! Combinatorial-class grammars: AST, Ω handling, the concrete DSL, and
//! static validation (well-foundedness and operator-argument valuations).

mod parse;
mod print;

pub use parse::{parse_grammar, ParseError};
pub use print::print_grammar;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Labeled classes translate to exponential generating functions, unlabeled
/// ones to ordinary generating functions. One grammar serves both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Labeled,
    Unlabeled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Labeled => write!(f, "labeled"),
            Mode::Unlabeled => write!(f, "unlabeled"),
        }
    }
}

/// The set Ω of admissible cycle sizes. Members must be >= 2; that invariant
/// is reported by [`GrammarSystem::validate`] rather than enforced on
/// construction, so that a parsed grammar can carry a bad Ω to the validator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OmegaSpec {
    Finite(BTreeSet<u64>),
    AtLeast(u64),
}

impl OmegaSpec {
    pub fn finite<I: IntoIterator<Item = u64>>(members: I) -> Result<Self, GrammarError> {
        let spec = OmegaSpec::Finite(members.into_iter().collect());
        match spec.invalid_members().is_empty() && !spec.is_empty() {
            true => Ok(spec),
            false => Err(GrammarError::InvalidOmega(spec.to_string())),
        }
    }

    pub fn at_least(k: u64) -> Result<Self, GrammarError> {
        if k >= 2 {
            Ok(OmegaSpec::AtLeast(k))
        } else {
            Err(GrammarError::InvalidOmega(format!(">={k}")))
        }
    }

    fn is_empty(&self) -> bool {
        matches!(self, OmegaSpec::Finite(s) if s.is_empty())
    }

    /// Members violating the "each greater than 1" requirement.
    pub fn invalid_members(&self) -> Vec<u64> {
        match self {
            OmegaSpec::Finite(s) => s.iter().copied().filter(|&m| m < 2).collect(),
            OmegaSpec::AtLeast(k) => {
                if *k < 2 {
                    vec![*k]
                } else {
                    vec![]
                }
            }
        }
    }

    pub fn contains(&self, m: u64) -> bool {
        match self {
            OmegaSpec::Finite(s) => s.contains(&m),
            OmegaSpec::AtLeast(k) => m >= *k,
        }
    }

    pub fn min_member(&self) -> Option<u64> {
        match self {
            OmegaSpec::Finite(s) => s.iter().next().copied(),
            OmegaSpec::AtLeast(k) => Some(*k),
        }
    }

    /// Members of Ω up to and including `max`, ascending.
    pub fn members_up_to(&self, max: u64) -> Vec<u64> {
        match self {
            OmegaSpec::Finite(s) => s.iter().copied().filter(|&m| m <= max).collect(),
            OmegaSpec::AtLeast(k) => (*k..=max).collect(),
        }
    }

    /// Parse the CLI / directive syntax: `{5}`, `{3,5,7}`, `>=3`.
    pub fn parse(text: &str) -> Result<Self, GrammarError> {
        let t = text.trim();
        if let Some(rest) = t.strip_prefix(">=") {
            let k: u64 = rest
                .trim()
                .parse()
                .map_err(|_| GrammarError::InvalidOmega(t.to_string()))?;
            return OmegaSpec::at_least(k);
        }
        if t.starts_with('{') && t.ends_with('}') {
            let inner = &t[1..t.len() - 1];
            let mut members = BTreeSet::new();
            for part in inner.split(',') {
                let m: u64 = part
                    .trim()
                    .parse()
                    .map_err(|_| GrammarError::InvalidOmega(t.to_string()))?;
                members.insert(m);
            }
            return OmegaSpec::finite(members);
        }
        Err(GrammarError::InvalidOmega(t.to_string()))
    }
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSpec::Finite(s) => {
                let parts: Vec<String> = s.iter().map(|m| m.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            OmegaSpec::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

/// Cardinality restriction on an operator: which numbers of components are
/// admitted. `Omega` and `OmegaMinus1` resolve against the system's Ω.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CardSpec {
    Exactly(u64),
    AtLeast(u64),
    Finite(BTreeSet<u64>),
    Omega,
    OmegaMinus1,
}

impl CardSpec {
    pub fn admits(&self, m: u64, omega: &OmegaSpec) -> bool {
        match self {
            CardSpec::Exactly(k) => m == *k,
            CardSpec::AtLeast(k) => m >= *k,
            CardSpec::Finite(s) => s.contains(&m),
            CardSpec::Omega => omega.contains(m),
            CardSpec::OmegaMinus1 => omega.contains(m + 1),
        }
    }

    pub fn admits_zero(&self, omega: &OmegaSpec) -> bool {
        self.admits(0, omega)
    }

    /// Smallest admitted cardinality, if any (Ω is never empty here).
    pub fn min_admitted(&self, omega: &OmegaSpec) -> Option<u64> {
        match self {
            CardSpec::Exactly(k) => Some(*k),
            CardSpec::AtLeast(k) => Some(*k),
            CardSpec::Finite(s) => s.iter().next().copied(),
            CardSpec::Omega => omega.min_member(),
            CardSpec::OmegaMinus1 => omega.min_member().map(|m| m - 1),
        }
    }
}

impl fmt::Display for CardSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardSpec::Exactly(k) => write!(f, "={k}"),
            CardSpec::AtLeast(k) => write!(f, ">={k}"),
            CardSpec::Finite(s) => {
                let parts: Vec<String> = s.iter().map(|m| m.to_string()).collect();
                write!(f, "in {{{}}}", parts.join(","))
            }
            CardSpec::Omega => write!(f, "in Omega"),
            CardSpec::OmegaMinus1 => write!(f, "in Omega-1"),
        }
    }
}

/// The five admissible-construction operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    Seq,
    Set,
    Cyc,
    USeq,
    UCyc,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Seq => "Seq",
            OperatorKind::Set => "Set",
            OperatorKind::Cyc => "Cyc",
            OperatorKind::USeq => "USeq",
            OperatorKind::UCyc => "UCyc",
        }
    }

    /// Cyc/UCyc have no size-0 object; the others default to `>=0`.
    pub fn default_card(self) -> CardSpec {
        match self {
            OperatorKind::Cyc | OperatorKind::UCyc => CardSpec::AtLeast(1),
            _ => CardSpec::AtLeast(0),
        }
    }

    pub fn forbids_empty(self) -> bool {
        matches!(self, OperatorKind::Cyc | OperatorKind::UCyc)
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expression AST. Sums and products are n-ary; subtraction is deliberately
/// unrepresentable inside rules (signed combinations live only in the root).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrammarExpr {
    Atom,
    One,
    Ref(String),
    Sum(Vec<GrammarExpr>),
    Prod(Vec<GrammarExpr>),
    Op {
        op: OperatorKind,
        card: CardSpec,
        arg: Box<GrammarExpr>,
    },
}

impl GrammarExpr {
    pub fn reference(name: &str) -> Self {
        GrammarExpr::Ref(name.to_string())
    }

    pub fn sum(terms: Vec<GrammarExpr>) -> Self {
        GrammarExpr::Sum(terms)
    }

    pub fn prod(factors: Vec<GrammarExpr>) -> Self {
        GrammarExpr::Prod(factors)
    }

    pub fn op(op: OperatorKind, card: CardSpec, arg: GrammarExpr) -> Self {
        GrammarExpr::Op {
            op,
            card,
            arg: Box::new(arg),
        }
    }

    fn for_each(&self, f: &mut impl FnMut(&GrammarExpr)) {
        f(self);
        match self {
            GrammarExpr::Sum(v) | GrammarExpr::Prod(v) => {
                for e in v {
                    e.for_each(f);
                }
            }
            GrammarExpr::Op { arg, .. } => arg.for_each(f),
            _ => {}
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("invalid omega specification: {0}")]
    InvalidOmega(String),
    #[error("duplicate rule name: {0}")]
    DuplicateRule(String),
    #[error("unresolved reference: {0}")]
    UnresolvedReference(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
}

/// One term of the signed root combination: `coefficient * rule`.
pub type RootTerm = (i64, String);

/// A named system of mutually recursive class definitions with a signed root
/// combination, an evaluation mode, and the Ω binding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarSystem {
    rules: Vec<(String, GrammarExpr)>,
    index: BTreeMap<String, usize>,
    root: Vec<RootTerm>,
    pub mode: Mode,
    pub omega: OmegaSpec,
}

impl GrammarSystem {
    pub fn new(
        rules: Vec<(String, GrammarExpr)>,
        root: Vec<RootTerm>,
        mode: Mode,
        omega: OmegaSpec,
    ) -> Result<Self, GrammarError> {
        let mut index = BTreeMap::new();
        for (i, (name, _)) in rules.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(GrammarError::DuplicateRule(name.clone()));
            }
        }
        let system = GrammarSystem {
            rules,
            index,
            root,
            mode,
            omega,
        };
        for (_, expr) in &system.rules {
            let mut missing = None;
            expr.for_each(&mut |e| {
                if let GrammarExpr::Ref(name) = e {
                    if missing.is_none() && !system.index.contains_key(name) {
                        missing = Some(name.clone());
                    }
                }
            });
            if let Some(name) = missing {
                return Err(GrammarError::UnresolvedReference(name));
            }
        }
        for (_, name) in &system.root {
            if !system.index.contains_key(name) {
                return Err(GrammarError::UnresolvedReference(name.clone()));
            }
        }
        Ok(system)
    }

    pub fn rules(&self) -> &[(String, GrammarExpr)] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&GrammarExpr> {
        self.index.get(name).map(|&i| &self.rules[i].1)
    }

    pub fn rule_position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn root(&self) -> &[RootTerm] {
        &self.root
    }

    /// Least sizes realizable by each rule, computed as the limit of the
    /// downward iteration from "no objects yet". `Infinite` means the rule
    /// generates nothing.
    pub fn valuation(&self) -> BTreeMap<String, Valuation> {
        let mut vals: Vec<Valuation> = vec![Valuation::Infinite; self.rules.len()];
        loop {
            let mut changed = false;
            for (i, (_, expr)) in self.rules.iter().enumerate() {
                let v = self.val_expr(expr, &vals);
                if v != vals[i] {
                    vals[i] = v;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.rules
            .iter()
            .enumerate()
            .map(|(i, (name, _))| (name.clone(), vals[i]))
            .collect()
    }

    fn val_expr(&self, expr: &GrammarExpr, vals: &[Valuation]) -> Valuation {
        match expr {
            GrammarExpr::Atom => Valuation::Finite(1),
            GrammarExpr::One => Valuation::Finite(0),
            GrammarExpr::Ref(name) => vals[self.index[name]],
            GrammarExpr::Sum(terms) => terms
                .iter()
                .map(|t| self.val_expr(t, vals))
                .min()
                .unwrap_or(Valuation::Infinite),
            GrammarExpr::Prod(factors) => {
                let mut total = Valuation::Finite(0);
                for fexpr in factors {
                    total = total.plus(self.val_expr(fexpr, vals));
                }
                total
            }
            GrammarExpr::Op { card, arg, .. } => {
                let v = self.val_expr(arg, vals);
                match card {
                    CardSpec::Exactly(m) => v.times(*m),
                    CardSpec::AtLeast(k) => match v {
                        // higher multiplicities only grow the size, so the
                        // minimum over m >= k sits at m = k
                        Valuation::Finite(0) => Valuation::Finite(0),
                        _ => v.times(*k),
                    },
                    CardSpec::Finite(s) => s
                        .iter()
                        .map(|&m| v.times(m))
                        .min()
                        .unwrap_or(Valuation::Infinite),
                    CardSpec::Omega => match self.omega.min_member() {
                        Some(m) => match (&self.omega, v) {
                            (OmegaSpec::AtLeast(_), Valuation::Finite(0)) => Valuation::Finite(0),
                            (OmegaSpec::AtLeast(_), _) => v.times(m),
                            (OmegaSpec::Finite(s), _) => s
                                .iter()
                                .map(|&m| v.times(m))
                                .min()
                                .unwrap_or(Valuation::Infinite),
                        },
                        None => Valuation::Infinite,
                    },
                    CardSpec::OmegaMinus1 => match self.omega.min_member() {
                        Some(m) => match (&self.omega, v) {
                            (OmegaSpec::AtLeast(_), Valuation::Finite(0)) => Valuation::Finite(0),
                            (OmegaSpec::AtLeast(_), _) => v.times(m.saturating_sub(1)),
                            (OmegaSpec::Finite(s), _) => s
                                .iter()
                                .map(|&m| v.times(m.saturating_sub(1)))
                                .min()
                                .unwrap_or(Valuation::Infinite),
                        },
                        None => Valuation::Infinite,
                    },
                }
            }
        }
    }

    /// Static checks; an empty result means the system is safe to evaluate.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        for m in self.omega.invalid_members() {
            diags.push(Diagnostic::OmegaMemberTooSmall(m));
        }
        if self.omega.is_empty() {
            diags.push(Diagnostic::OmegaEmpty);
        }
        let vals = self.valuation();
        for (name, v) in &vals {
            if *v == Valuation::Infinite {
                diags.push(Diagnostic::EmptyRule(name.clone()));
            }
        }
        let flat: Vec<Valuation> = self.rules.iter().map(|(n, _)| vals[n]).collect();
        for (name, expr) in &self.rules {
            expr.for_each(&mut |e| {
                if let GrammarExpr::Op { op, card, arg } = e {
                    match self.val_expr(arg, &flat) {
                        Valuation::Finite(0) => diags.push(Diagnostic::OperatorArgumentEmptySize {
                            rule: name.clone(),
                            op: *op,
                        }),
                        Valuation::Infinite => diags.push(Diagnostic::OperatorArgumentVoid {
                            rule: name.clone(),
                            op: *op,
                        }),
                        _ => {}
                    }
                    let mut has_one = false;
                    arg.for_each(&mut |inner| {
                        if matches!(inner, GrammarExpr::One) {
                            has_one = true;
                        }
                    });
                    if has_one {
                        diags.push(Diagnostic::NeutralUnderOperator {
                            rule: name.clone(),
                            op: *op,
                        });
                    }
                    if op.forbids_empty() && card.admits_zero(&self.omega) {
                        diags.push(Diagnostic::CycleCardinalityZero {
                            rule: name.clone(),
                            op: *op,
                        });
                    }
                }
            });
        }
        diags
    }
}

/// Size valuation over natural numbers extended with infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    fn plus(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a.saturating_add(b)),
            _ => Valuation::Infinite,
        }
    }

    /// `m` copies of a value of this size; zero copies cost nothing even of
    /// an impossible object.
    fn times(self, m: u64) -> Valuation {
        if m == 0 {
            return Valuation::Finite(0);
        }
        match self {
            Valuation::Finite(v) => Valuation::Finite(v.saturating_mul(m)),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    OmegaMemberTooSmall(u64),
    OmegaEmpty,
    EmptyRule(String),
    OperatorArgumentEmptySize { rule: String, op: OperatorKind },
    OperatorArgumentVoid { rule: String, op: OperatorKind },
    NeutralUnderOperator { rule: String, op: OperatorKind },
    CycleCardinalityZero { rule: String, op: OperatorKind },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::OmegaMemberTooSmall(m) => {
                write!(f, "omega member {m} is not greater than 1")
            }
            Diagnostic::OmegaEmpty => write!(f, "omega is empty"),
            Diagnostic::EmptyRule(name) => {
                write!(f, "rule {name} generates no objects (valuation is infinite)")
            }
            Diagnostic::OperatorArgumentEmptySize { rule, op } => write!(
                f,
                "in rule {rule}: argument of {op} admits size-0 objects (valuation 0)"
            ),
            Diagnostic::OperatorArgumentVoid { rule, op } => write!(
                f,
                "in rule {rule}: argument of {op} generates no objects"
            ),
            Diagnostic::NeutralUnderOperator { rule, op } => write!(
                f,
                "in rule {rule}: the neutral class 1 may not appear under {op}"
            ),
            Diagnostic::CycleCardinalityZero { rule, op } => write!(
                f,
                "in rule {rule}: {op} cardinality admits 0 components"
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(rules: Vec<(&str, GrammarExpr)>, root: &str) -> GrammarSystem {
        GrammarSystem::new(
            rules
                .into_iter()
                .map(|(n, e)| (n.to_string(), e))
                .collect(),
            vec![(1, root.to_string())],
            Mode::Unlabeled,
            OmegaSpec::at_least(2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn valuation_plane_tree() {
        let b = sys(
            vec![(
                "B",
                GrammarExpr::prod(vec![
                    GrammarExpr::Atom,
                    GrammarExpr::op(
                        OperatorKind::Seq,
                        CardSpec::AtLeast(0),
                        GrammarExpr::reference("B"),
                    ),
                ]),
            )],
            "B",
        );
        assert_eq!(b.valuation()["B"], Valuation::Finite(1));
        assert!(b.validate().is_empty());
    }

    #[test]
    fn valuation_mutual_fixed_point() {
        // P = Seq(=4; Z + SX), SX = Z * Seq(>=1; P)
        let s = sys(
            vec![
                (
                    "P",
                    GrammarExpr::op(
                        OperatorKind::Seq,
                        CardSpec::Exactly(4),
                        GrammarExpr::sum(vec![GrammarExpr::Atom, GrammarExpr::reference("SX")]),
                    ),
                ),
                (
                    "SX",
                    GrammarExpr::prod(vec![
                        GrammarExpr::Atom,
                        GrammarExpr::op(
                            OperatorKind::Seq,
                            CardSpec::AtLeast(1),
                            GrammarExpr::reference("P"),
                        ),
                    ]),
                ),
            ],
            "P",
        );
        let vals = s.valuation();
        assert_eq!(vals["P"], Valuation::Finite(4));
        assert_eq!(vals["SX"], Valuation::Finite(5));
    }

    #[test]
    fn valuation_self_reference_is_infinite() {
        let s = sys(vec![("X", GrammarExpr::reference("X"))], "X");
        assert_eq!(s.valuation()["X"], Valuation::Infinite);
        assert!(s
            .validate()
            .iter()
            .any(|d| matches!(d, Diagnostic::EmptyRule(n) if n == "X")));
    }

    #[test]
    fn validate_rejects_zero_valuation_argument() {
        let s = sys(
            vec![(
                "A",
                GrammarExpr::op(
                    OperatorKind::Set,
                    CardSpec::AtLeast(0),
                    GrammarExpr::sum(vec![GrammarExpr::One, GrammarExpr::Atom]),
                ),
            )],
            "A",
        );
        assert!(s
            .validate()
            .iter()
            .any(|d| matches!(d, Diagnostic::OperatorArgumentEmptySize { .. })));
    }

    #[test]
    fn validate_rejects_small_omega() {
        let s = GrammarSystem::new(
            vec![("A".to_string(), GrammarExpr::Atom)],
            vec![(1, "A".to_string())],
            Mode::Unlabeled,
            OmegaSpec::Finite([1u64, 3].into_iter().collect()),
        )
        .unwrap();
        assert!(s
            .validate()
            .iter()
            .any(|d| matches!(d, Diagnostic::OmegaMemberTooSmall(1))));
    }

    #[test]
    fn validate_rejects_cyc_admitting_zero() {
        let s = sys(
            vec![(
                "A",
                GrammarExpr::op(
                    OperatorKind::Cyc,
                    CardSpec::AtLeast(0),
                    GrammarExpr::Atom,
                ),
            )],
            "A",
        );
        assert!(s
            .validate()
            .iter()
            .any(|d| matches!(d, Diagnostic::CycleCardinalityZero { .. })));
    }

    #[test]
    fn omega_parsing() {
        assert_eq!(OmegaSpec::parse("{5}").unwrap(), OmegaSpec::finite([5]).unwrap());
        assert_eq!(OmegaSpec::parse(">=3").unwrap(), OmegaSpec::at_least(3).unwrap());
        assert_eq!(
            OmegaSpec::parse("{3, 5, 7}").unwrap(),
            OmegaSpec::finite([3, 5, 7]).unwrap()
        );
        assert!(OmegaSpec::parse("{1,3}").is_err());
        assert!(OmegaSpec::parse("five").is_err());
    }

    #[test]
    fn omega_minus_one_card() {
        let omega = OmegaSpec::finite([3, 5]).unwrap();
        assert!(CardSpec::OmegaMinus1.admits(2, &omega));
        assert!(CardSpec::OmegaMinus1.admits(4, &omega));
        assert!(!CardSpec::OmegaMinus1.admits(3, &omega));
        assert_eq!(CardSpec::OmegaMinus1.min_admitted(&omega), Some(2));
    }

    #[test]
    fn valuation_is_monotone_under_added_summands() {
        // adding a summand to a rule may only keep or lower valuations
        let base = parse_grammar(
            "@omega {4};\n@root P;\nP = Seq(in Omega-1; Z + S);\nS = Z * Seq(>=1; P);",
        )
        .unwrap();
        let before = base.valuation();
        for extra in ["Z", "Z * Z", "S", "Seq(=2; P)"] {
            let text = format!(
                "@omega {{4}};\n@root P;\nP = Seq(in Omega-1; Z + S) + {extra};\nS = Z * Seq(>=1; P);"
            );
            let grown = parse_grammar(&text).unwrap();
            let after = grown.valuation();
            for (name, v) in &after {
                assert!(v <= &before[name], "{extra}: {name} rose to {v}");
            }
        }
    }
}
