//! Built-in grammar families for cactus graphs: the general template
//! (every combination of plane/free and rooted/unrooted, any Ω) and the
//! more concise simplified systems for the same four families.
//!
//! Generated nonterminal names are fixed (S_C, S_X, P, T_S, T_P, T_SP, Q, G)
//! so a printed system can be compared directly against a hand-written one.

use crate::engine::{evaluate, EngineError};
use crate::grammar::{
    CardSpec, GrammarError, GrammarExpr, GrammarSystem, Mode, OmegaSpec, OperatorKind,
};
use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Embedding {
    Plane,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rooting {
    Rooted,
    Unrooted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Template,
    Simplified,
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Embedding::Plane => write!(f, "plane"),
            Embedding::Free => write!(f, "free"),
        }
    }
}

impl fmt::Display for Rooting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rooting::Rooted => write!(f, "rooted"),
            Rooting::Unrooted => write!(f, "unrooted"),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Template => write!(f, "template"),
            Form::Simplified => write!(f, "simplified"),
        }
    }
}

/// Everything needed to pick one cactus family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub embedding: Embedding,
    pub rooting: Rooting,
    pub labeling: Mode,
    pub omega: OmegaSpec,
    pub form: Form,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} cacti, omega {}",
            self.embedding, self.rooting, self.labeling, self.omega
        )
    }
}

fn atom() -> GrammarExpr {
    GrammarExpr::Atom
}

fn rf(name: &str) -> GrammarExpr {
    GrammarExpr::reference(name)
}

fn op(kind: OperatorKind, card: CardSpec, arg: GrammarExpr) -> GrammarExpr {
    GrammarExpr::op(kind, card, arg)
}

fn prod(factors: Vec<GrammarExpr>) -> GrammarExpr {
    GrammarExpr::prod(factors)
}

fn sum(terms: Vec<GrammarExpr>) -> GrammarExpr {
    GrammarExpr::sum(terms)
}

/// The general template. Operator choices per embedding:
/// plane uses Cyc/Seq/Seq/Cyc for X/Y/Z/W, free uses Set/Set/USeq/UCyc.
pub fn build_template(spec: &FamilySpec) -> Result<GrammarSystem, GrammarError> {
    assert_eq!(spec.form, Form::Template, "spec.form must be template");
    let (x, y, z, w) = match spec.embedding {
        Embedding::Plane => (
            OperatorKind::Cyc,
            OperatorKind::Seq,
            OperatorKind::Seq,
            OperatorKind::Cyc,
        ),
        Embedding::Free => (
            OperatorKind::Set,
            OperatorKind::Set,
            OperatorKind::USeq,
            OperatorKind::UCyc,
        ),
    };
    let mut rules = vec![
        (
            "S_C".to_string(),
            op(x, CardSpec::AtLeast(2), rf("P")),
        ),
        (
            "S_X".to_string(),
            prod(vec![atom(), op(y, CardSpec::AtLeast(1), rf("P"))]),
        ),
        (
            "P".to_string(),
            op(z, CardSpec::OmegaMinus1, sum(vec![atom(), rf("S_X")])),
        ),
    ];
    let root = match spec.rooting {
        Rooting::Rooted => {
            rules.push((
                "G".to_string(),
                prod(vec![atom(), sum(vec![rf("P"), rf("S_C")])]),
            ));
            vec![(1, "G".to_string())]
        }
        Rooting::Unrooted => {
            rules.push(("T_S".to_string(), prod(vec![atom(), rf("S_C")])));
            rules.push((
                "T_P".to_string(),
                op(w, CardSpec::Omega, sum(vec![atom(), rf("S_X")])),
            ));
            rules.push(("T_SP".to_string(), prod(vec![rf("P"), rf("S_X")])));
            vec![
                (1, "T_S".to_string()),
                (1, "T_P".to_string()),
                (-1, "T_SP".to_string()),
            ]
        }
    };
    GrammarSystem::new(rules, root, spec.labeling, spec.omega.clone())
}

/// The simplified systems. The unrooted ones carry their low-order
/// corrections as extra signed root terms.
pub fn build_simplified(spec: &FamilySpec) -> Result<GrammarSystem, GrammarError> {
    assert_eq!(spec.form, Form::Simplified, "spec.form must be simplified");
    let omega = spec.omega.clone();
    match (spec.embedding, spec.rooting) {
        (Embedding::Free, Rooting::Rooted) => {
            // G = Z * Set(>=1; USeq(in Omega-1; Z + G))
            let rules = vec![(
                "G".to_string(),
                prod(vec![
                    atom(),
                    op(
                        OperatorKind::Set,
                        CardSpec::AtLeast(1),
                        op(
                            OperatorKind::USeq,
                            CardSpec::OmegaMinus1,
                            sum(vec![atom(), rf("G")]),
                        ),
                    ),
                ]),
            )];
            GrammarSystem::new(rules, vec![(1, "G".to_string())], spec.labeling, omega)
        }
        (Embedding::Plane, Rooting::Rooted) => {
            // G = Z * Cyc(>=1; Seq(in Omega-1; Q)); Q = Z * Seq(Seq(in Omega-1; Q))
            let inner = |target: &str| op(OperatorKind::Seq, CardSpec::OmegaMinus1, rf(target));
            let rules = vec![
                (
                    "Q".to_string(),
                    prod(vec![
                        atom(),
                        op(OperatorKind::Seq, CardSpec::AtLeast(0), inner("Q")),
                    ]),
                ),
                (
                    "G".to_string(),
                    prod(vec![
                        atom(),
                        op(OperatorKind::Cyc, CardSpec::AtLeast(1), inner("Q")),
                    ]),
                ),
            ];
            GrammarSystem::new(rules, vec![(1, "G".to_string())], spec.labeling, omega)
        }
        (Embedding::Free, Rooting::Unrooted) => {
            // G = UCyc(in Omega; Q) - Q * USeq(in Omega-1; Q) + Q - Z
            // with Q = Z * Set(USeq(in Omega-1; Q))
            let useq_q = || op(OperatorKind::USeq, CardSpec::OmegaMinus1, rf("Q"));
            let rules = vec![
                (
                    "Q".to_string(),
                    prod(vec![
                        atom(),
                        op(OperatorKind::Set, CardSpec::AtLeast(0), useq_q()),
                    ]),
                ),
                (
                    "T_C".to_string(),
                    op(OperatorKind::UCyc, CardSpec::Omega, rf("Q")),
                ),
                ("T_Q".to_string(), prod(vec![rf("Q"), useq_q()])),
                ("Z_A".to_string(), atom()),
            ];
            GrammarSystem::new(
                rules,
                vec![
                    (1, "T_C".to_string()),
                    (-1, "T_Q".to_string()),
                    (1, "Q".to_string()),
                    (-1, "Z_A".to_string()),
                ],
                spec.labeling,
                omega,
            )
        }
        (Embedding::Plane, Rooting::Unrooted) => {
            // G = Cyc(in Omega; Q) + Z * Cyc(>=2; Seq(in Omega-1; Q))
            //     - (Q - Z) * Seq(in Omega-1; Q)
            // with Q = Z * Seq(Seq(in Omega-1; Q)); the (Q - Z) product is
            // expanded into two root terms to keep subtraction out of rules
            let seq_q = || op(OperatorKind::Seq, CardSpec::OmegaMinus1, rf("Q"));
            let rules = vec![
                (
                    "Q".to_string(),
                    prod(vec![
                        atom(),
                        op(OperatorKind::Seq, CardSpec::AtLeast(0), seq_q()),
                    ]),
                ),
                (
                    "T_C".to_string(),
                    op(OperatorKind::Cyc, CardSpec::Omega, rf("Q")),
                ),
                (
                    "T_R".to_string(),
                    prod(vec![
                        atom(),
                        op(OperatorKind::Cyc, CardSpec::AtLeast(2), seq_q()),
                    ]),
                ),
                ("T_Q".to_string(), prod(vec![rf("Q"), seq_q()])),
                ("Z_S".to_string(), prod(vec![atom(), seq_q()])),
            ];
            GrammarSystem::new(
                rules,
                vec![
                    (1, "T_C".to_string()),
                    (1, "T_R".to_string()),
                    (-1, "T_Q".to_string()),
                    (1, "Z_S".to_string()),
                ],
                spec.labeling,
                omega,
            )
        }
    }
}

/// Build the system for a family spec, template or simplified.
pub fn build(spec: &FamilySpec) -> Result<GrammarSystem, GrammarError> {
    match spec.form {
        Form::Template => build_template(spec),
        Form::Simplified => build_simplified(spec),
    }
}

/// A counting sequence together with the family's minimum realizable size.
/// Grammars do not generate the single-vertex cactus (and, depending on Ω,
/// some other small sizes); the raw output is reported unchanged and the
/// first realizable size is surfaced instead of fabricating terms.
#[derive(Debug, Clone)]
pub struct FamilyCounts {
    pub spec: FamilySpec,
    pub counts: Vec<BigInt>,
    pub min_size: Option<usize>,
}

pub fn family_counts(spec: &FamilySpec, order: usize) -> Result<FamilyCounts, EngineError> {
    let system = build(spec)?;
    let env = evaluate(&system, order)?;
    let counts = env.counts()?;
    let min_size = counts.iter().position(|c| !c.is_zero());
    Ok(FamilyCounts {
        spec: spec.clone(),
        counts,
        min_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar;

    fn spec(
        embedding: Embedding,
        rooting: Rooting,
        labeling: Mode,
        omega: OmegaSpec,
        form: Form,
    ) -> FamilySpec {
        FamilySpec {
            embedding,
            rooting,
            labeling,
            omega,
            form,
        }
    }

    #[test]
    fn template_pu5_matches_displayed_grammar() {
        let built = build_template(&spec(
            Embedding::Plane,
            Rooting::Unrooted,
            Mode::Unlabeled,
            OmegaSpec::finite([5]).unwrap(),
            Form::Template,
        ))
        .unwrap();
        let written = parse_grammar(
            "
            @mode unlabeled;
            @omega {5};
            @root T_S + T_P - T_SP;
            S_C = Cyc(>=2; P);
            S_X = Z * Seq(>=1; P);
            P = Seq(in Omega-1; Z + S_X);
            T_S = Z * S_C;
            T_P = Cyc(in Omega; Z + S_X);
            T_SP = P * S_X;
            ",
        )
        .unwrap();
        assert_eq!(built, written);
    }

    #[test]
    fn all_template_systems_validate() {
        for embedding in [Embedding::Plane, Embedding::Free] {
            for rooting in [Rooting::Rooted, Rooting::Unrooted] {
                for omega in [
                    OmegaSpec::finite([2]).unwrap(),
                    OmegaSpec::finite([3, 5]).unwrap(),
                    OmegaSpec::at_least(2).unwrap(),
                    OmegaSpec::at_least(4).unwrap(),
                ] {
                    let t = build_template(&spec(
                        embedding,
                        rooting,
                        Mode::Unlabeled,
                        omega.clone(),
                        Form::Template,
                    ))
                    .unwrap();
                    assert!(t.validate().is_empty(), "{embedding} {rooting} {omega}");
                    let s = build_simplified(&spec(
                        embedding,
                        rooting,
                        Mode::Unlabeled,
                        omega.clone(),
                        Form::Simplified,
                    ))
                    .unwrap();
                    assert!(s.validate().is_empty(), "{embedding} {rooting} {omega}");
                }
            }
        }
    }

    #[test]
    fn trees_from_omega_two() {
        // free rooted with Omega = {2} degenerates to rooted trees
        let fc = family_counts(
            &spec(
                Embedding::Free,
                Rooting::Rooted,
                Mode::Unlabeled,
                OmegaSpec::finite([2]).unwrap(),
                Form::Template,
            ),
            10,
        )
        .unwrap();
        let expect: Vec<BigInt> = [0i64, 0, 1, 2, 4, 9, 20, 48, 115, 286, 719]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        assert_eq!(fc.counts, expect);
        assert_eq!(fc.min_size, Some(2));
    }

    #[test]
    fn labeled_rooted_triangles() {
        let fc = family_counts(
            &spec(
                Embedding::Free,
                Rooting::Rooted,
                Mode::Labeled,
                OmegaSpec::finite([3]).unwrap(),
                Form::Template,
            ),
            3,
        )
        .unwrap();
        assert_eq!(fc.counts[3], BigInt::from(3));
    }

    #[test]
    fn pure_k_sparsity() {
        // for Omega = {k}, unrooted counts live only at n = (k-1) j + 1
        for k in [3usize, 4, 5] {
            let fc = family_counts(
                &spec(
                    Embedding::Plane,
                    Rooting::Unrooted,
                    Mode::Unlabeled,
                    OmegaSpec::finite([k as u64]).unwrap(),
                    Form::Template,
                ),
                25,
            )
            .unwrap();
            for (n, c) in fc.counts.iter().enumerate() {
                if !c.is_zero() {
                    assert_eq!((n + k - 2) % (k - 1), 0, "k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn unrooted_at_most_rooted() {
        for embedding in [Embedding::Plane, Embedding::Free] {
            let omega = OmegaSpec::at_least(3).unwrap();
            let rooted = family_counts(
                &spec(
                    embedding,
                    Rooting::Rooted,
                    Mode::Unlabeled,
                    omega.clone(),
                    Form::Template,
                ),
                14,
            )
            .unwrap();
            let unrooted = family_counts(
                &spec(
                    embedding,
                    Rooting::Unrooted,
                    Mode::Unlabeled,
                    omega,
                    Form::Template,
                ),
                14,
            )
            .unwrap();
            for n in 0..=14 {
                assert!(unrooted.counts[n] <= rooted.counts[n], "{embedding} n={n}");
            }
        }
    }

    #[test]
    fn low_order_terms_vanish_in_both_forms() {
        // neither form generates the empty or single-vertex object; the
        // simplified unrooted corrections (+Q - Z styles) cancel at n = 1
        for embedding in [Embedding::Plane, Embedding::Free] {
            for rooting in [Rooting::Rooted, Rooting::Unrooted] {
                for omega in [OmegaSpec::at_least(2).unwrap(), OmegaSpec::finite([3]).unwrap()] {
                    for form in [Form::Template, Form::Simplified] {
                        let fc = family_counts(
                            &spec(embedding, rooting, Mode::Unlabeled, omega.clone(), form),
                            6,
                        )
                        .unwrap();
                        assert!(fc.counts[0].is_zero(), "{embedding} {rooting} {form} n=0");
                        assert!(fc.counts[1].is_zero(), "{embedding} {rooting} {form} n=1");
                        assert!(fc.min_size.unwrap() >= 2);
                    }
                }
            }
        }
    }

    #[test]
    fn labeled_rooted_is_n_times_unrooted() {
        for embedding in [Embedding::Plane, Embedding::Free] {
            for omega in [OmegaSpec::at_least(2).unwrap(), OmegaSpec::finite([3]).unwrap()] {
                let rooted = family_counts(
                    &spec(
                        embedding,
                        Rooting::Rooted,
                        Mode::Labeled,
                        omega.clone(),
                        Form::Template,
                    ),
                    7,
                )
                .unwrap();
                let unrooted = family_counts(
                    &spec(
                        embedding,
                        Rooting::Unrooted,
                        Mode::Labeled,
                        omega.clone(),
                        Form::Template,
                    ),
                    7,
                )
                .unwrap();
                for n in 0..=7 {
                    assert_eq!(
                        rooted.counts[n],
                        &unrooted.counts[n] * BigInt::from(n),
                        "{embedding} omega {omega} n={n}"
                    );
                }
            }
        }
    }
}
