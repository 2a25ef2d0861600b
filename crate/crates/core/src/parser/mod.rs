//! Concrete syntax: reading and printing Lustre and NLustre programs.
//!
//! Clock annotations on equations are written `x :: base on c = e;`, local
//! clocks in declarations `v: int when c when not d`. Security types are
//! never written; they are inferred.

mod lexer;
mod parse;
mod pretty;

use std::fmt;

use crate::ast::Span;

pub use lexer::KEYWORDS;
pub use parse::{parse_nlustre, parse_program};
pub use pretty::{
    clock as pretty_clock, equation as pretty_equation, expr as pretty_expr, pretty, DialectMismatch,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> ParseError {
        ParseError { span, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.col_start, self.message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{BinOp, Body, Dialect, Expr, UnOp};

    const CNT_DN: &str = "node cnt_dn(res: bool; n: int) returns (cpt: int)\n\
                          let\n  cpt = if res then n else n fby cpt - 1;\ntel\n";

    fn round_trip(src: &str) {
        let p = parse_program(src).unwrap();
        let printed = pretty(&p, Dialect::Lustre).unwrap();
        assert_eq!(parse_program(&printed).unwrap(), p, "printed:\n{}", printed);
    }

    #[test]
    fn cnt_dn_parses_to_one_equation() {
        let p = parse_program(CNT_DN).unwrap();
        assert_eq!(p.nodes.len(), 1);
        assert_eq!(p.nodes[0].body.len(), 1);
        assert_eq!(pretty(&p, Dialect::Lustre).unwrap(), CNT_DN);
    }

    #[test]
    fn empty_equation_is_a_syntax_error() {
        let e = parse_program("node f() returns (o:int) let o = ; tel").unwrap_err();
        assert_eq!((e.span.line, e.span.col_start), (1, 34));
    }

    #[test]
    fn reserved_word_as_name_is_rejected() {
        let e = parse_program("node let(x: int) returns (o: int) let o = x; tel").unwrap_err();
        assert!(e.message.contains("reserved"), "{}", e);
    }

    #[test]
    fn when_not_is_false_sampling() {
        let p = parse_program("node f(c: bool; x: int) returns (o: int) var y: int when not c; let y = x when not c; o = 0; tel").unwrap();
        let Body::Lustre(eqs) = &p.nodes[0].body else { panic!() };
        assert_eq!(eqs[0].rhs[0], Expr::When(vec![Expr::var("x")], "c".into(), false));
    }

    #[test]
    fn precedence_and_associativity() {
        let p = parse_program("node f(a, b, c: int) returns (o: int) let o = a - b - c * 2; tel").unwrap();
        let Body::Lustre(eqs) = &p.nodes[0].body else { panic!() };
        let want = Expr::binop(
            BinOp::Sub,
            Expr::binop(BinOp::Sub, Expr::var("a"), Expr::var("b")),
            Expr::binop(BinOp::Mul, Expr::var("c"), Expr::int(2)),
        );
        assert_eq!(eqs[0].rhs[0], want);
    }

    #[test]
    fn negative_literals_and_negation_round_trip() {
        round_trip("node f(a: int) returns (o: int) let o = -(5) + -5 - -a - - -a; tel");
        round_trip("node f(a: int) returns (o: int) let o = -9223372036854775808 + 9223372036854775807; tel");
        let p = parse_program("node f(a: int) returns (o: int) let o = -(5); tel").unwrap();
        let Body::Lustre(eqs) = &p.nodes[0].body else { panic!() };
        assert_eq!(eqs[0].rhs[0], Expr::unop(UnOp::Neg, Expr::int(5)));
    }

    #[test]
    fn tuples_merges_and_calls_round_trip() {
        round_trip(
            "node g(x, y: int) returns (a, b: int) let (a, b) = (x, y) fby (y, x); tel\n\
             node f(c: bool; x: int) returns (o, p: int) var u, v: int when c;\n\
             let (u, v) = g((x, x) when c); (o, p) = merge c (u, v) ((0, 1) when not c); tel",
        );
    }

    #[test]
    fn comparison_chains_are_rejected() {
        assert!(parse_program("node f(a: int) returns (o: bool) let o = a < a < a; tel").is_err());
    }

    #[test]
    fn nlustre_requires_clock_annotations() {
        let src = "node f(x: int) returns (o: int) let o :: base = 0 fby x; tel";
        let p = parse_nlustre(src).unwrap();
        assert_eq!(
            pretty(&p, Dialect::NLustre).unwrap(),
            "node f(x: int) returns (o: int)\nlet\n  o :: base = 0 fby x;\ntel\n"
        );
        assert!(parse_nlustre("node f(x: int) returns (o: int) let o = x; tel").is_err());
        let lustre = parse_program(src).unwrap();
        assert!(pretty(&lustre, Dialect::NLustre).is_err());
    }

    #[test]
    fn empty_node_prints_let_tel() {
        let p = parse_program("node f() returns () let tel").unwrap();
        assert_eq!(pretty(&p, Dialect::Lustre).unwrap(), "node f() returns ()\nlet\ntel\n");
    }
}
