//! Recursive-descent parser for the grammar DSL.
//!
//! ```text
//! # line comment
//! @mode unlabeled;            # or labeled
//! @omega {5};                 # or >=3, {3,5,7}
//! @root T_S + T_P - T_SP;     # signed combination of rule names
//!
//! P  = Seq(in Omega-1; Z + S_X);
//! S_X = Z * Seq(>=1; P);
//! ```
//!
//! Expressions: `Z` (the atom), `1` (the neutral class), rule names, `+`, `*`
//! (binding tighter than `+`), and `Op(card; expr)` with `Op` one of
//! Seq/Set/Cyc/USeq/UCyc. The cardinality is optional: `Seq(B)` means
//! `Seq(>=0; B)`, while `Cyc(B)` means `Cyc(>=1; B)`.

use super::{CardSpec, GrammarError, GrammarExpr, GrammarSystem, Mode, OmegaSpec, OperatorKind};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    At,
    Eq,
    Semi,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Ge, // >=
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>,
                        line: &mut usize,
                        col: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars, &mut line, &mut col);
            }
            '#' => {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    bump(&mut chars, &mut line, &mut col);
                }
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut ident = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        ident.push(bump(&mut chars, &mut line, &mut col));
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Ident(ident),
                    line: tline,
                    col: tcol,
                });
            }
            '0'..='9' => {
                let mut num = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_digit() {
                        num.push(bump(&mut chars, &mut line, &mut col));
                    } else {
                        break;
                    }
                }
                let value = num.parse().map_err(|_| ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("integer literal out of range: {num}"),
                })?;
                out.push(Spanned {
                    tok: Tok::Int(value),
                    line: tline,
                    col: tcol,
                });
            }
            '>' => {
                bump(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars, &mut line, &mut col);
                    out.push(Spanned {
                        tok: Tok::Ge,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    return Err(ParseError {
                        line: tline,
                        col: tcol,
                        message: "expected '>=' after '>'".to_string(),
                    });
                }
            }
            _ => {
                let tok = match c {
                    '@' => Tok::At,
                    '=' => Tok::Eq,
                    ';' => Tok::Semi,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    other => {
                        return Err(ParseError {
                            line: tline,
                            col: tcol,
                            message: format!("unexpected character '{other}'"),
                        })
                    }
                };
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                if let Some(Tok::Ident(name)) = self.next() {
                    Ok(name)
                } else {
                    unreachable!()
                }
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                if let Some(Tok::Int(v)) = self.next() {
                    Ok(v)
                } else {
                    unreachable!()
                }
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn parse_finite_set(&mut self) -> Result<BTreeSet<u64>, ParseError> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut members = BTreeSet::new();
        loop {
            members.insert(self.expect_int("integer set member")?);
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                }
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected ',' or '}' in set")),
            }
        }
        Ok(members)
    }

    /// `=k`, `>=k`, `in {a,b}`, `in Omega`, `in Omega-1`
    fn parse_card(&mut self) -> Result<CardSpec, ParseError> {
        match self.peek() {
            Some(Tok::Eq) => {
                self.pos += 1;
                Ok(CardSpec::Exactly(self.expect_int("cardinality")?))
            }
            Some(Tok::Ge) => {
                self.pos += 1;
                Ok(CardSpec::AtLeast(self.expect_int("cardinality")?))
            }
            Some(Tok::Ident(word)) if word == "in" => {
                self.pos += 1;
                match self.peek() {
                    Some(Tok::LBrace) => Ok(CardSpec::Finite(self.parse_finite_set()?)),
                    Some(Tok::Ident(w)) if w == "Omega" => {
                        self.pos += 1;
                        if self.peek() == Some(&Tok::Minus) {
                            self.pos += 1;
                            let one = self.expect_int("1 after 'Omega-'")?;
                            if one != 1 {
                                return Err(self.err("only Omega-1 is supported"));
                            }
                            Ok(CardSpec::OmegaMinus1)
                        } else {
                            Ok(CardSpec::Omega)
                        }
                    }
                    _ => Err(self.err("expected '{...}' or 'Omega' after 'in'")),
                }
            }
            _ => Err(self.err("expected cardinality")),
        }
    }

    fn parse_expr(&mut self) -> Result<GrammarExpr, ParseError> {
        let mut terms = vec![self.parse_term()?];
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            terms.push(self.parse_term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            GrammarExpr::Sum(terms)
        })
    }

    fn parse_term(&mut self) -> Result<GrammarExpr, ParseError> {
        let mut factors = vec![self.parse_factor()?];
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            factors.push(self.parse_factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            GrammarExpr::Prod(factors)
        })
    }

    fn operator_kind(name: &str) -> Option<OperatorKind> {
        match name {
            "Seq" => Some(OperatorKind::Seq),
            "Set" => Some(OperatorKind::Set),
            "Cyc" => Some(OperatorKind::Cyc),
            "USeq" => Some(OperatorKind::USeq),
            "UCyc" => Some(OperatorKind::UCyc),
            _ => None,
        }
    }

    fn parse_factor(&mut self) -> Result<GrammarExpr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(GrammarExpr::One)
            }
            Some(Tok::Int(_)) => Err(self.err("integer literals other than 1 are not classes")),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "Z" {
                    return Ok(GrammarExpr::Atom);
                }
                if let Some(op) = Self::operator_kind(&name) {
                    self.expect(Tok::LParen, &format!("'(' after {name}"))?;
                    // optional `card ;` before the argument
                    let card = match self.peek() {
                        Some(Tok::Eq) | Some(Tok::Ge) => {
                            let c = self.parse_card()?;
                            self.expect(Tok::Semi, "';' after cardinality")?;
                            c
                        }
                        Some(Tok::Ident(w)) if w == "in" => {
                            let c = self.parse_card()?;
                            self.expect(Tok::Semi, "';' after cardinality")?;
                            c
                        }
                        _ => op.default_card(),
                    };
                    let arg = self.parse_expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(GrammarExpr::op(op, card, arg));
                }
                Ok(GrammarExpr::Ref(name))
            }
            _ => Err(self.err("expected an expression")),
        }
    }

    /// `[+|-] [k] Name ( (+|-) [k] Name )*`
    fn parse_root(&mut self) -> Result<Vec<(i64, String)>, ParseError> {
        let mut terms = Vec::new();
        let mut sign = 1i64;
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            sign = -1;
        } else if self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
        }
        loop {
            let coeff = match self.peek() {
                Some(Tok::Int(_)) => self.expect_int("coefficient")? as i64,
                _ => 1,
            };
            let name = self.expect_ident("rule name in root combination")?;
            terms.push((sign * coeff, name));
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => break,
            }
        }
        Ok(terms)
    }
}

/// Parse a complete grammar source file.
pub fn parse_grammar(text: &str) -> Result<GrammarSystem, GrammarError> {
    let toks = lex(text).map_err(GrammarError::Parse)?;
    let mut p = Parser { toks, pos: 0 };
    let mut mode = None;
    let mut omega = None;
    let mut root: Option<Vec<(i64, String)>> = None;
    let mut rules: Vec<(String, GrammarExpr)> = Vec::new();

    while p.peek().is_some() {
        match p.peek().cloned() {
            Some(Tok::At) => {
                p.pos += 1;
                let directive = p.expect_ident("directive name").map_err(GrammarError::Parse)?;
                match directive.as_str() {
                    "mode" => {
                        let value = p.expect_ident("labeled or unlabeled").map_err(GrammarError::Parse)?;
                        mode = Some(match value.as_str() {
                            "labeled" => Mode::Labeled,
                            "unlabeled" => Mode::Unlabeled,
                            _ => {
                                return Err(GrammarError::Parse(
                                    p.err("mode must be 'labeled' or 'unlabeled'"),
                                ))
                            }
                        });
                    }
                    "omega" => {
                        omega = Some(match p.peek() {
                            Some(Tok::LBrace) => {
                                OmegaSpec::Finite(p.parse_finite_set().map_err(GrammarError::Parse)?)
                            }
                            Some(Tok::Ge) => {
                                p.pos += 1;
                                OmegaSpec::AtLeast(
                                    p.expect_int("omega threshold").map_err(GrammarError::Parse)?,
                                )
                            }
                            _ => {
                                return Err(GrammarError::Parse(
                                    p.err("expected '{...}' or '>=k' after @omega"),
                                ))
                            }
                        });
                    }
                    "root" => {
                        root = Some(p.parse_root().map_err(GrammarError::Parse)?);
                    }
                    other => {
                        return Err(GrammarError::Parse(
                            p.err(format!("unknown directive @{other}")),
                        ))
                    }
                }
                p.expect(Tok::Semi, "';' after directive").map_err(GrammarError::Parse)?;
            }
            Some(Tok::Ident(_)) => {
                let name = p.expect_ident("rule name").map_err(GrammarError::Parse)?;
                p.expect(Tok::Eq, "'=' after rule name").map_err(GrammarError::Parse)?;
                let expr = p.parse_expr().map_err(GrammarError::Parse)?;
                p.expect(Tok::Semi, "';' after rule").map_err(GrammarError::Parse)?;
                rules.push((name, expr));
            }
            _ => return Err(GrammarError::Parse(p.err("expected a directive or a rule"))),
        }
    }

    let root = match root {
        Some(r) => r,
        // default: the first rule is the root
        None => match rules.first() {
            Some((name, _)) => vec![(1, name.clone())],
            None => {
                return Err(GrammarError::Parse(ParseError {
                    line: 1,
                    col: 1,
                    message: "grammar has no rules".to_string(),
                }))
            }
        },
    };
    GrammarSystem::new(
        rules,
        root,
        mode.unwrap_or(Mode::Unlabeled),
        omega.unwrap_or(OmegaSpec::AtLeast(2)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_template_style_rule() {
        let text = "
            @mode unlabeled;
            @omega {5};
            @root P;
            P = Seq(in Omega-1; Z + SX);
            SX = Z * Seq(>=1; P);
            SC = Cyc(>=2; P);
        ";
        let sys = parse_grammar(text).unwrap();
        assert_eq!(
            sys.rule("P").unwrap(),
            &GrammarExpr::op(
                OperatorKind::Seq,
                CardSpec::OmegaMinus1,
                GrammarExpr::sum(vec![GrammarExpr::Atom, GrammarExpr::reference("SX")]),
            )
        );
        assert_eq!(sys.omega, OmegaSpec::Finite([5].into_iter().collect()));
    }

    #[test]
    fn parses_one_rule_system_with_default_card() {
        let sys = parse_grammar("B = Z * Seq(B);").unwrap();
        assert_eq!(sys.root(), &[(1, "B".to_string())]);
        assert_eq!(
            sys.rule("B").unwrap(),
            &GrammarExpr::prod(vec![
                GrammarExpr::Atom,
                GrammarExpr::op(
                    OperatorKind::Seq,
                    CardSpec::AtLeast(0),
                    GrammarExpr::reference("B")
                ),
            ])
        );
    }

    #[test]
    fn parses_signed_root_combination() {
        let text = "
            @root T_S + T_P - T_SP;
            T_S = Z;
            T_P = Z;
            T_SP = Z;
        ";
        let sys = parse_grammar(text).unwrap();
        assert_eq!(
            sys.root(),
            &[
                (1, "T_S".to_string()),
                (1, "T_P".to_string()),
                (-1, "T_SP".to_string())
            ]
        );
    }

    #[test]
    fn rejects_unresolved_reference() {
        assert_eq!(
            parse_grammar("A = B;"),
            Err(GrammarError::UnresolvedReference("B".to_string()))
        );
    }

    #[test]
    fn rejects_duplicate_rule() {
        assert_eq!(
            parse_grammar("A = Z; A = Z;"),
            Err(GrammarError::DuplicateRule("A".to_string()))
        );
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_grammar("A = Z +;");
        match err {
            Err(GrammarError::Parse(e)) => {
                assert_eq!(e.line, 1);
                assert_eq!(e.col, 8);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let sys = parse_grammar("# heading\nA = Z; # trailing\n").unwrap();
        assert_eq!(sys.rules().len(), 1);
    }

    #[test]
    fn rejects_subtraction_inside_rule() {
        assert!(matches!(
            parse_grammar("A = Z - Z;"),
            Err(GrammarError::Parse(_))
        ));
    }
}
