use std::fmt::Write;

use crate::ast::{BinOp, Body, Clock, Decl, Dialect, Equation, Expr, Literal, Node, Program, UnOp};

use super::parse::binop_level;

// Printing levels, loosest first. An expression printed where a tighter
// level is required gets parentheses.
const IF: usize = 0;
const FBY: usize = 1;
const BIN: usize = 2; // `or`; binary operator level n prints at BIN + n
const UNARY: usize = 7;
const WHEN: usize = 8;
const ATOM: usize = 9;
const BRANCH: usize = 10;

fn level(e: &Expr) -> usize {
    match e {
        Expr::Ite(..) => IF,
        Expr::Fby(..) => FBY,
        Expr::Binop(op, _, _) => BIN + binop_level(*op),
        Expr::Unop(..) => UNARY,
        Expr::Const(Literal::Int(i)) if *i < 0 => UNARY,
        Expr::When(..) => WHEN,
        Expr::Call(..) => ATOM,
        Expr::Const(_) | Expr::Var(_) | Expr::Merge(..) => BRANCH,
    }
}

pub fn expr(e: &Expr) -> String {
    at(e, IF)
}

fn at(e: &Expr, min: usize) -> String {
    let s = raw(e);
    if level(e) < min {
        format!("({})", s)
    } else {
        s
    }
}

/// A list of flows in a position expecting level `min`: a lone expression
/// prints as itself, a tuple in parentheses.
fn list(es: &[Expr], min: usize) -> String {
    match es {
        [e] => at(e, min),
        _ => format!("({})", es.iter().map(expr).collect::<Vec<_>>().join(", ")),
    }
}

fn raw(e: &Expr) -> String {
    match e {
        Expr::Const(c) => c.to_string(),
        Expr::Var(x) => x.clone(),
        Expr::Unop(UnOp::Not, e) => format!("not {}", at(e, UNARY)),
        Expr::Unop(UnOp::Neg, e) => {
            let s = at(e, UNARY);
            if s.starts_with(|c: char| c.is_ascii_digit()) {
                // `-5` would read back as a negative literal.
                format!("-({})", s)
            } else if s.starts_with('-') {
                format!("- {}", s)
            } else {
                format!("-{}", s)
            }
        }
        Expr::Binop(op, a, b) => {
            let l = BIN + binop_level(*op);
            let (la, lb) =
                if binop_level(*op) == binop_level(BinOp::Eq) { (l + 1, l + 1) } else { (l, l + 1) };
            format!("{} {} {}", at(a, la), op.symbol(), at(b, lb))
        }
        Expr::When(es, x, k) => {
            format!("{} when {}{}", list(es, ATOM), if *k { "" } else { "not " }, x)
        }
        Expr::Merge(x, ts, fs) => format!("merge {} {} {}", x, list(ts, BRANCH), list(fs, BRANCH)),
        Expr::Ite(c, ts, fs) => format!("if {} then {} else {}", expr(c), list(ts, IF), list(fs, IF)),
        Expr::Fby(e0s, es) => format!("{} fby {}", list(e0s, BIN), list(es, FBY)),
        Expr::Call(f, args) => format!("{}({})", f, args.iter().map(expr).collect::<Vec<_>>().join(", ")),
    }
}

pub fn clock(ck: &Clock) -> String {
    let mut s = "base".to_string();
    for (x, k) in ck.samplings() {
        let _ = write!(s, " on {}{}", if k { "" } else { "not " }, x);
    }
    s
}

fn decl(d: &Decl) -> String {
    let mut s = format!("{}: {}", d.name, d.ty);
    if let Some(ck) = &d.clock {
        for (x, k) in ck.samplings() {
            let _ = write!(s, " when {}{}", if k { "" } else { "not " }, x);
        }
    }
    s
}

fn decls(ds: &[Decl]) -> String {
    ds.iter().map(decl).collect::<Vec<_>>().join("; ")
}

pub fn equation(eq: &Equation) -> String {
    let lhs = eq.lhs.join(", ");
    let lhs = if eq.lhs.len() > 1 { format!("({})", lhs) } else { lhs };
    let ck = match &eq.clock {
        Some(ck) => format!(" :: {}", clock(ck)),
        None => String::new(),
    };
    let rhs = match eq.rhs.as_slice() {
        [e] => expr(e),
        es => format!("({})", es.iter().map(expr).collect::<Vec<_>>().join(", ")),
    };
    format!("{}{} = {};", lhs, ck, rhs)
}

pub fn node(n: &Node) -> String {
    let mut s = format!("node {}({}) returns ({})\n", n.name, decls(&n.inputs), decls(&n.outputs));
    if !n.locals.is_empty() {
        let _ = writeln!(s, "var {};", decls(&n.locals));
    }
    s.push_str("let\n");
    for eq in n.body.lustre_equations() {
        let _ = writeln!(s, "  {}", equation(&eq));
    }
    s.push_str("tel\n");
    s
}

/// Error raised when a program is printed in a dialect its bodies are not in.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("node {node} is in {found} form, not {wanted}")]
pub struct DialectMismatch {
    pub node: String,
    pub found: Dialect,
    pub wanted: Dialect,
}

/// Prints a program in a deterministic layout.
///
/// NLustre printing requires every node body to be in NLustre form; Lustre
/// printing accepts both, since NLustre is a subset of Lustre.
pub fn pretty(p: &Program, dialect: Dialect) -> Result<String, DialectMismatch> {
    let mut parts = Vec::new();
    for n in &p.nodes {
        if dialect == Dialect::NLustre && !matches!(n.body, Body::NLustre(_)) {
            return Err(DialectMismatch { node: n.name.clone(), found: n.body.dialect(), wanted: dialect });
        }
        parts.push(node(n));
    }
    Ok(parts.join("\n"))
}
