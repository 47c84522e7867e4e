//! Pretty-printer for grammar systems. `parse_grammar(print_grammar(s))`
//! reproduces the AST exactly, which the round-trip tests rely on.

use super::{GrammarExpr, GrammarSystem};
use std::fmt::Write;

fn write_expr(out: &mut String, expr: &GrammarExpr) {
    match expr {
        GrammarExpr::Atom => out.push('Z'),
        GrammarExpr::One => out.push('1'),
        GrammarExpr::Ref(name) => out.push_str(name),
        GrammarExpr::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_expr(out, t);
            }
        }
        GrammarExpr::Prod(factors) => {
            for (i, fac) in factors.iter().enumerate() {
                if i > 0 {
                    out.push_str(" * ");
                }
                // sums bind looser than products
                if matches!(fac, GrammarExpr::Sum(_)) {
                    out.push('(');
                    write_expr(out, fac);
                    out.push(')');
                } else {
                    write_expr(out, fac);
                }
            }
        }
        GrammarExpr::Op { op, card, arg } => {
            let _ = write!(out, "{}({}; ", op.name(), card);
            write_expr(out, arg);
            out.push(')');
        }
    }
}

pub fn print_grammar(system: &GrammarSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@mode {};", system.mode);
    let _ = writeln!(out, "@omega {};", system.omega);
    let mut root = String::new();
    for (i, (coeff, name)) in system.root().iter().enumerate() {
        let sign = if *coeff < 0 { "-" } else { "+" };
        if i == 0 {
            if *coeff < 0 {
                root.push_str("- ");
            }
        } else {
            root.push_str(&format!(" {sign} "));
        }
        let mag = coeff.unsigned_abs();
        if mag != 1 {
            root.push_str(&format!("{mag} "));
        }
        root.push_str(name);
    }
    let _ = writeln!(out, "@root {root};");
    out.push('\n');
    for (name, expr) in system.rules() {
        let mut body = String::new();
        write_expr(&mut body, expr);
        let _ = writeln!(out, "{name} = {body};");
    }
    out
}

// kept here so the printer and parser agree on which names are operators
#[allow(dead_code)]
fn is_operator_name(name: &str) -> bool {
    matches!(name, "Seq" | "Set" | "Cyc" | "USeq" | "UCyc")
}
