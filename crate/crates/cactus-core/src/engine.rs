//! Translate a validated grammar into truncated power series and extract
//! exact counting sequences.
//!
//! One grammar evaluates in two modes: unlabeled classes translate to
//! ordinary generating functions with multiset/necklace semantics for
//! Set/Cyc/USeq/UCyc, labeled classes to exponential generating functions
//! where the same operators divide by the order of the relevant symmetry.
//!
//! The solver is a plain fixed-point iteration from the zero assignment.
//! For a validated system every sweep pins down at least one further
//! coefficient, so sweeps are capped at `N + 2`. Sweeps start at a small
//! truncation order and grow it by one per sweep, which keeps early sweeps
//! from recomputing garbage high-order coefficients.

use crate::grammar::{CardSpec, Diagnostic, GrammarExpr, GrammarSystem, Mode, OmegaSpec, OperatorKind};
use crate::series::{Coeff, PowerSeries, SeriesError};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("grammar failed validation: {}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("fixed point did not converge within {sweeps} sweeps (ill-founded system)")]
    NonConvergence { sweeps: usize },
    #[error("operator argument has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("{op} requires at least one component (cardinality 0 requested)")]
    EmptyCycle { op: OperatorKind },
    #[error("rule {rule} has a non-integer coefficient at index {index} in unlabeled mode")]
    NonIntegerRuleCoefficient { rule: String, index: usize },
    #[error("rule {rule} has a negative coefficient at index {index}")]
    NegativeRuleCoefficient { rule: String, index: usize },
    #[error("root count at index {index} is not a non-negative integer")]
    BadRootCount { index: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Grammar(#[from] crate::grammar::GrammarError),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// The result of evaluating a system: one series per rule plus the signed
/// root combination. Immutable once built.
#[derive(Debug, Clone)]
pub struct SeriesEnvironment {
    pub order: usize,
    pub mode: Mode,
    names: Vec<String>,
    series: Vec<PowerSeries>,
    root: PowerSeries,
    pub sweeps: usize,
}

impl SeriesEnvironment {
    pub fn rule(&self, name: &str) -> Option<&PowerSeries> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.series[i])
    }

    pub fn root(&self) -> &PowerSeries {
        &self.root
    }

    /// Exact counts c_0..c_N of the root class. In labeled mode the EGF
    /// coefficient is multiplied by n! here and never earlier.
    pub fn counts(&self) -> Result<Vec<BigInt>, EngineError> {
        let mut out = Vec::with_capacity(self.order + 1);
        let mut factorial = BigInt::one();
        for n in 0..=self.order {
            if n > 0 {
                factorial *= n as i64;
            }
            let c = match self.mode {
                Mode::Unlabeled => self.root.coeff(n).clone(),
                Mode::Labeled => self.root.coeff(n) * Coeff::from_integer(factorial.clone()),
            };
            if !c.denom().is_one() || c.is_negative() {
                return Err(EngineError::BadRootCount { index: n });
            }
            out.push(c.to_integer());
        }
        Ok(out)
    }
}

/// Exact counting sequence of an environment (labeled counts include n!).
pub fn counts(env: &SeriesEnvironment) -> Result<Vec<BigInt>, EngineError> {
    env.counts()
}

/// Evaluate all rules of a validated system to truncation order `order`.
pub fn evaluate(system: &GrammarSystem, order: usize) -> Result<SeriesEnvironment, EngineError> {
    let diags = system.validate();
    if !diags.is_empty() {
        return Err(EngineError::Invalid(diags));
    }

    let n_rules = system.rules().len();
    let max_sweeps = order + 2;
    let mut active = order.min(4);
    let mut series: Vec<PowerSeries> = vec![PowerSeries::zero(active); n_rules];
    let mut sweeps = 0usize;
    loop {
        if sweeps >= max_sweeps {
            return Err(EngineError::NonConvergence { sweeps });
        }
        sweeps += 1;
        let mut changed = false;
        for (i, (_, expr)) in system.rules().iter().enumerate() {
            let next = eval_expr(expr, system, &series, active)?;
            if next != series[i] {
                series[i] = next;
                changed = true;
            }
        }
        if active == order {
            if !changed {
                break;
            }
        } else {
            active += 1;
            for s in &mut series {
                *s = s.resized(active);
            }
        }
    }

    if system.mode == Mode::Unlabeled {
        for (i, (name, _)) in system.rules().iter().enumerate() {
            for n in 0..=order {
                let c = series[i].coeff(n);
                if !c.denom().is_one() {
                    return Err(EngineError::NonIntegerRuleCoefficient {
                        rule: name.clone(),
                        index: n,
                    });
                }
                if c.is_negative() {
                    return Err(EngineError::NegativeRuleCoefficient {
                        rule: name.clone(),
                        index: n,
                    });
                }
            }
        }
    }

    let mut root = PowerSeries::zero(order);
    for (coeff, name) in system.root() {
        let idx = system.rule_position(name).expect("validated root ref");
        root.add_assign_scaled(&series[idx], &Coeff::from_integer(BigInt::from(*coeff)))?;
    }

    Ok(SeriesEnvironment {
        order,
        mode: system.mode,
        names: system.rules().iter().map(|(n, _)| n.clone()).collect(),
        series,
        root,
        sweeps,
    })
}

fn eval_expr(
    expr: &GrammarExpr,
    system: &GrammarSystem,
    env: &[PowerSeries],
    order: usize,
) -> Result<PowerSeries, EngineError> {
    match expr {
        GrammarExpr::Atom => Ok(PowerSeries::atom(order)),
        GrammarExpr::One => Ok(PowerSeries::one(order)),
        GrammarExpr::Ref(name) => {
            Ok(env[system.rule_position(name).expect("validated ref")].clone())
        }
        GrammarExpr::Sum(terms) => {
            let mut acc = PowerSeries::zero(order);
            for t in terms {
                acc.add_assign(&eval_expr(t, system, env, order)?)?;
            }
            Ok(acc)
        }
        GrammarExpr::Prod(factors) => {
            let mut acc = PowerSeries::one(order);
            for f in factors {
                acc = acc.mul(&eval_expr(f, system, env, order)?)?;
            }
            Ok(acc)
        }
        GrammarExpr::Op { op, card, arg } => {
            let a = eval_expr(arg, system, env, order)?;
            restricted_operator(*op, card, &a, system.mode, &system.omega)
        }
    }
}

/// The exact-m operator applied to `a`: Seq_m, Set_m, Cyc_m, USeq_m or
/// UCyc_m in the requested mode.
pub fn operator_series(
    op: OperatorKind,
    m: u64,
    a: &PowerSeries,
    mode: Mode,
) -> Result<PowerSeries, EngineError> {
    // Ω is irrelevant for an exact cardinality
    let omega = OmegaSpec::AtLeast(2);
    restricted_operator(op, &CardSpec::Exactly(m), a, mode, &omega)
}

/// Sum of exact-m operator applications over every admitted cardinality.
/// Terms with m * val(a) > N vanish, so the expansion is finite.
pub fn restricted_operator(
    op: OperatorKind,
    card: &CardSpec,
    a: &PowerSeries,
    mode: Mode,
    omega: &OmegaSpec,
) -> Result<PowerSeries, EngineError> {
    if !a.coeff(0).is_zero() {
        return Err(EngineError::NonzeroConstantTerm);
    }
    if op.forbids_empty() && card.admits_zero(omega) {
        return Err(EngineError::EmptyCycle { op });
    }
    let order = a.order();
    let val = a.valuation().unwrap_or(order + 1).max(1);
    // largest cardinality whose exact-m term can reach the truncation order
    let m_max = (order / val) as u64;
    let admits = |m: u64| card.admits(m, omega);

    let mut acc = PowerSeries::zero(order);
    if admits(0) && !op.forbids_empty() {
        acc.add_assign(&PowerSeries::one(order))?;
    }

    match (mode, op) {
        (_, OperatorKind::Seq) | (Mode::Labeled, _) => {
            // labeled Set/Cyc/USeq/UCyc only rescale A^m
            let mut pw = a.clone();
            for m in 1..=m_max {
                if admits(m) {
                    let weight = match (mode, op) {
                        (_, OperatorKind::Seq) => Coeff::one(),
                        (Mode::Labeled, OperatorKind::Set) => {
                            Coeff::new(BigInt::one(), factorial(m))
                        }
                        (Mode::Labeled, OperatorKind::Cyc) => {
                            Coeff::new(BigInt::one(), BigInt::from(m))
                        }
                        (Mode::Labeled, OperatorKind::USeq) => {
                            if m <= 1 {
                                Coeff::one()
                            } else {
                                Coeff::new(BigInt::one(), BigInt::from(2))
                            }
                        }
                        (Mode::Labeled, OperatorKind::UCyc) => match m {
                            1 => Coeff::one(),
                            2 => Coeff::new(BigInt::one(), BigInt::from(2)),
                            _ => Coeff::new(BigInt::one(), BigInt::from(2 * m)),
                        },
                        (Mode::Unlabeled, _) => unreachable!(),
                    };
                    acc.add_assign_scaled(&pw, &weight)?;
                }
                if m < m_max {
                    pw = pw.mul(a)?;
                }
            }
            Ok(acc)
        }
        (Mode::Unlabeled, OperatorKind::Set) => {
            // Newton recurrence h_j = (1/j) sum_{k=1..j} p_k h_{j-k}
            // with p_k = A(x^k); h_j is the exact-j multiset series.
            let j_max = m_max as usize;
            let p: Vec<PowerSeries> = (1..=j_max.max(1))
                .map(|k| a.substitute_power(k))
                .collect();
            let mut h: Vec<PowerSeries> = vec![PowerSeries::one(order)];
            for j in 1..=j_max {
                let mut next = PowerSeries::zero(order);
                for k in 1..=j {
                    let term = p[k - 1].mul(&h[j - k])?;
                    next.add_assign(&term)?;
                }
                let next = next.scale(&Coeff::new(BigInt::one(), BigInt::from(j)));
                if admits(j as u64) {
                    acc.add_assign(&next)?;
                }
                h.push(next);
            }
            Ok(acc)
        }
        (Mode::Unlabeled, OperatorKind::Cyc) => {
            add_cyc_terms(&mut acc, a, order, val, m_max, &admits, Coeff::one())?;
            Ok(acc)
        }
        (Mode::Unlabeled, OperatorKind::USeq) => {
            let a2 = a.substitute_power(2);
            let mut pw = a.clone();
            let mut pw2 = PowerSeries::one(order); // a2^floor(m/2)
            let half = Coeff::new(BigInt::one(), BigInt::from(2));
            for m in 1..=m_max {
                if m % 2 == 0 {
                    pw2 = pw2.mul(&a2)?;
                }
                if admits(m) {
                    if m <= 1 {
                        acc.add_assign(&pw)?;
                    } else if m % 2 == 0 {
                        // (A^m + A2^{m/2}) / 2
                        acc.add_assign_scaled(&pw, &half)?;
                        acc.add_assign_scaled(&pw2, &half)?;
                    } else {
                        // (A^m + A * A2^{(m-1)/2}) / 2
                        acc.add_assign_scaled(&pw, &half)?;
                        acc.add_assign_scaled(&a.mul(&pw2)?, &half)?;
                    }
                }
                if m < m_max {
                    pw = pw.mul(a)?;
                }
            }
            Ok(acc)
        }
        (Mode::Unlabeled, OperatorKind::UCyc) => {
            let half = Coeff::new(BigInt::one(), BigInt::from(2));
            add_cyc_terms(&mut acc, a, order, val, m_max, &admits, half.clone())?;
            let quarter = Coeff::new(BigInt::one(), BigInt::from(4));
            let a2 = a.substitute_power(2);
            let asq = a.mul(a)?;
            // Reflection terms. The even formula at m = 2 reduces to Set_2
            // and the odd one at m = 1 to A, so no special cases are needed.
            // `low` tracks a2^floor((m-1)/2).
            let mut low = PowerSeries::one(order);
            for m in 1..=m_max {
                if m % 2 == 1 && m >= 3 {
                    low = low.mul(&a2)?;
                }
                if admits(m) {
                    if m % 2 == 1 {
                        // A * A2^{(m-1)/2} / 2
                        acc.add_assign_scaled(&a.mul(&low)?, &half)?;
                    } else {
                        // (A2^{m/2} + A^2 * A2^{(m-2)/2}) / 4
                        acc.add_assign_scaled(&low.mul(&a2)?, &quarter)?;
                        acc.add_assign_scaled(&asq.mul(&low)?, &quarter)?;
                    }
                }
            }
            Ok(acc)
        }
    }
}

/// Accumulate `weight * sum over admitted m of Cyc_m(A)` using the divisor
/// form Cyc_m = (1/m) sum_{d|m} phi(d) A(x^d)^{m/d}, reorganized as a loop
/// over (d, j) pairs with incremental powers of each substituted series.
fn add_cyc_terms(
    acc: &mut PowerSeries,
    a: &PowerSeries,
    order: usize,
    val: usize,
    m_max: u64,
    admits: &dyn Fn(u64) -> bool,
    weight: Coeff,
) -> Result<(), EngineError> {
    let d_max = (order / val) as u64;
    for d in 1..=d_max {
        let ad = a.substitute_power(d as usize);
        if ad.is_zero() {
            continue;
        }
        let phi = Coeff::from_integer(BigInt::from(euler_phi(d)));
        let mut pw = ad.clone();
        let mut j = 1u64;
        loop {
            let m = d * j;
            if m > m_max {
                break;
            }
            if admits(m) {
                let w = &phi * Coeff::new(BigInt::one(), BigInt::from(m)) * &weight;
                acc.add_assign_scaled(&pw, &w)?;
            }
            j += 1;
            if d * j > m_max {
                break;
            }
            pw = pw.mul(&ad)?;
            if pw.is_zero() {
                break;
            }
        }
    }
    Ok(())
}

/// Euler's totient by trial division; arguments stay tiny.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn factorial(m: u64) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=m {
        f *= i;
    }
    f
}
