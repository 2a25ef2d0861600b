use crate::ast::{
    BinOp, Body, Clock, Decl, Equation, Expr, Ident, NCExpr, NEquation, NExpr, Node, Program, Span, UnOp,
    ValueType,
};

use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

type PResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.is_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(self.span(), msg))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(x) => format!("identifier {}", x),
            Tok::Int(n) => format!("integer {}", n),
            Tok::Kw(k) => format!("keyword {}", k),
            Tok::Sym(s) => format!("'{}'", s),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", k, self.describe()))
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected '{}', found {}", s, self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            Tok::Kw(k) => self.error(format!("reserved word {} cannot be used as an identifier", k)),
            _ => self.error(format!("expected an identifier, found {}", self.describe())),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut nodes = Vec::new();
        while *self.peek() != Tok::Eof {
            nodes.push(self.node()?);
        }
        Ok(Program { nodes })
    }

    fn node(&mut self) -> PResult<Node> {
        let start = self.span();
        self.expect_kw("node")?;
        let name = self.ident()?;
        self.expect_sym("(")?;
        let inputs = self.decls(")")?;
        self.expect_sym(")")?;
        self.expect_kw("returns")?;
        self.expect_sym("(")?;
        let outputs = self.decls(")")?;
        self.expect_sym(")")?;
        self.eat_sym(";");
        let mut locals = Vec::new();
        if self.eat_kw("var") {
            locals = self.decls("let")?;
            if locals.is_empty() {
                return self.error("expected local declarations after var");
            }
        }
        self.expect_kw("let")?;
        let mut eqs = Vec::new();
        while !self.is_kw("tel") {
            if *self.peek() == Tok::Eof {
                return self.error("expected tel, found end of input");
            }
            eqs.push(self.equation()?);
        }
        self.expect_kw("tel")?;
        self.eat_sym(";");
        let end = self.prev_span();
        let span = Span::new(
            start.line,
            start.col_start,
            if end.line == start.line { end.col_end } else { start.col_end },
        );
        Ok(Node { name, inputs, outputs, locals, body: Body::Lustre(eqs), span })
    }

    /// Declaration groups `x, y: ty [when c ...]` separated by `;` or `,`,
    /// up to (not including) the closing token.
    fn decls(&mut self, close: &str) -> PResult<Vec<Decl>> {
        let at_close = |p: &Parser| p.is_sym(close) || p.is_kw(close);
        let mut out = Vec::new();
        while !at_close(self) {
            let mut names = vec![self.ident()?];
            while self.eat_sym(",") {
                names.push(self.ident()?);
            }
            self.expect_sym(":")?;
            let ty = match self.bump() {
                Tok::Kw("bool") => ValueType::Bool,
                Tok::Kw("int") => ValueType::Int,
                _ => return Err(ParseError::new(self.prev_span(), "expected a type (bool or int)")),
            };
            let mut clock = None;
            while self.eat_kw("when") {
                let k = !self.eat_kw("not");
                let x = self.ident()?;
                clock = Some(clock.unwrap_or(Clock::Base).on(x, k));
            }
            for n in names {
                out.push(Decl { name: n, ty, clock: clock.clone() });
            }
            if !(self.eat_sym(";") || self.eat_sym(",")) {
                break;
            }
        }
        Ok(out)
    }

    fn equation(&mut self) -> PResult<Equation> {
        let start = self.span();
        let mut lhs = Vec::new();
        if self.eat_sym("(") {
            lhs.push(self.ident()?);
            while self.eat_sym(",") {
                lhs.push(self.ident()?);
            }
            self.expect_sym(")")?;
        } else {
            lhs.push(self.ident()?);
            while self.eat_sym(",") {
                lhs.push(self.ident()?);
            }
        }
        let clock = if self.eat_sym("::") { Some(self.clock()?) } else { None };
        self.expect_sym("=")?;
        if self.is_sym(";") {
            return self.error("expected an expression");
        }
        let rhs = self.expr_list()?;
        self.expect_sym(";")?;
        let end = self.prev_span();
        let span = Span::new(
            start.line,
            start.col_start,
            if end.line == start.line { end.col_end } else { start.col_end },
        );
        Ok(Equation { lhs, rhs, clock, span })
    }

    fn clock(&mut self) -> PResult<Clock> {
        self.expect_kw("base")?;
        let mut ck = Clock::Base;
        while self.eat_kw("on") {
            let k = !self.eat_kw("not");
            ck = ck.on(self.ident()?, k);
        }
        Ok(ck)
    }

    fn expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut out = self.expr()?;
        while self.eat_sym(",") {
            out.extend(self.expr()?);
        }
        Ok(out)
    }

    fn single(&self, mut es: Vec<Expr>, at: Span) -> PResult<Expr> {
        if es.len() != 1 {
            return Err(ParseError::new(
                at,
                format!("expected a single expression, found a tuple of {}", es.len()),
            ));
        }
        Ok(es.pop().unwrap())
    }

    fn expr(&mut self) -> PResult<Vec<Expr>> {
        if self.is_kw("if") {
            return self.ite();
        }
        self.fby()
    }

    fn ite(&mut self) -> PResult<Vec<Expr>> {
        self.expect_kw("if")?;
        let at = self.span();
        let c = self.expr()?;
        let c = self.single(c, at)?;
        self.expect_kw("then")?;
        let t = self.expr()?;
        self.expect_kw("else")?;
        let f = self.expr()?;
        Ok(vec![Expr::Ite(Box::new(c), t, f)])
    }

    fn fby(&mut self) -> PResult<Vec<Expr>> {
        let head = self.binary(0)?;
        if self.eat_kw("fby") {
            let tail = self.fby()?;
            return Ok(vec![Expr::Fby(head, tail)]);
        }
        Ok(head)
    }

    fn binop_at(&self, level: usize) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::Kw("or") => BinOp::Or,
            Tok::Kw("and") => BinOp::And,
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("<>") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            Tok::Sym("/") | Tok::Kw("div") => BinOp::Div,
            Tok::Kw("mod") => BinOp::Mod,
            _ => return None,
        };
        (binop_level(op) == level).then_some(op)
    }

    /// Binary operators, levels 0 (or) to 4 (multiplicative).
    fn binary(&mut self, level: usize) -> PResult<Vec<Expr>> {
        if level > 4 {
            return self.unary();
        }
        let at = self.span();
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop_at(level) {
            self.bump();
            let a = self.single(lhs, at)?;
            let at_b = self.span();
            let rhs = self.binary(level + 1)?;
            let b = self.single(rhs, at_b)?;
            lhs = vec![Expr::binop(op, a, b)];
            // Comparisons do not chain.
            if level == 2 && self.binop_at(level).is_some() {
                return self.error("comparison operators do not associate; add parentheses");
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Vec<Expr>> {
        let at = self.span();
        if self.eat_kw("not") {
            let e = self.unary()?;
            return Ok(vec![Expr::unop(UnOp::Not, self.single(e, at)?)]);
        }
        if self.eat_sym("-") {
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                let v = -(n as i128);
                if v < i64::MIN as i128 {
                    return Err(ParseError::new(self.prev_span(), "integer literal too large"));
                }
                return self.postfix(vec![Expr::int(v as i64)]);
            }
            let e = self.unary()?;
            return Ok(vec![Expr::unop(UnOp::Neg, self.single(e, at)?)]);
        }
        let p = self.primary()?;
        self.postfix(p)
    }

    fn postfix(&mut self, mut es: Vec<Expr>) -> PResult<Vec<Expr>> {
        while self.eat_kw("when") {
            let k = !self.eat_kw("not");
            let x = self.ident()?;
            es = vec![Expr::When(es, x, k)];
        }
        Ok(es)
    }

    /// Merge branches: primaries where a bare identifier is a variable,
    /// never the start of a call.
    fn branch(&mut self) -> PResult<Vec<Expr>> {
        if let Tok::Ident(x) = self.peek().clone() {
            self.bump();
            return Ok(vec![Expr::Var(x)]);
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Vec<Expr>> {
        match self.peek().clone() {
            Tok::Int(n) => {
                if n > i64::MAX as u128 {
                    return self.error("integer literal too large");
                }
                self.bump();
                Ok(vec![Expr::int(n as i64)])
            }
            Tok::Kw("true") => {
                self.bump();
                Ok(vec![Expr::bool(true)])
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(vec![Expr::bool(false)])
            }
            Tok::Kw("if") => self.ite(),
            Tok::Kw("merge") => {
                self.bump();
                let x = self.ident()?;
                let t = self.branch()?;
                let f = self.branch()?;
                Ok(vec![Expr::Merge(x, t, f)])
            }
            Tok::Sym("(") => {
                self.bump();
                let es = self.expr_list()?;
                self.expect_sym(")")?;
                Ok(es)
            }
            Tok::Ident(x) => {
                self.bump();
                if self.eat_sym("(") {
                    let args = if self.is_sym(")") { Vec::new() } else { self.expr_list()? };
                    self.expect_sym(")")?;
                    return Ok(vec![Expr::Call(x, args)]);
                }
                Ok(vec![Expr::Var(x)])
            }
            Tok::Kw(k) => self.error(format!("unexpected keyword {} in expression", k)),
            _ => self.error(format!("expected an expression, found {}", self.describe())),
        }
    }
}

pub(super) fn binop_level(op: BinOp) -> usize {
    match op {
        BinOp::Or => 0,
        BinOp::And => 1,
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 2,
        BinOp::Add | BinOp::Sub => 3,
        BinOp::Mul | BinOp::Div | BinOp::Mod => 4,
    }
}

/// Parses a Lustre program.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let toks = tokenize(src)?;
    Parser { toks, pos: 0 }.program()
}

/// Parses an NLustre program: every equation carries a `::` clock and has
/// the restricted NLustre shape.
pub fn parse_nlustre(src: &str) -> Result<Program, ParseError> {
    let p = parse_program(src)?;
    let mut nodes = Vec::new();
    for n in p.nodes {
        let Body::Lustre(eqs) = &n.body else { unreachable!() };
        let neqs = eqs.iter().map(to_nequation).collect::<Result<Vec<_>, _>>()?;
        nodes.push(Node { body: Body::NLustre(neqs), ..n });
    }
    Ok(Program { nodes })
}

fn to_nequation(eq: &Equation) -> Result<NEquation, ParseError> {
    let err = |m: &str| ParseError::new(eq.span, format!("not an NLustre equation: {}", m));
    let clock = eq.clock.clone().ok_or_else(|| err("missing clock annotation"))?;
    let rhs = match eq.rhs.as_slice() {
        [e] => e,
        _ => return Err(err("tuple right-hand side")),
    };
    match rhs {
        Expr::Call(f, args) => Ok(NEquation::Call {
            vars: eq.lhs.clone(),
            node: f.clone(),
            args: args
                .iter()
                .map(|a| to_nexpr(a).ok_or_else(|| err("nested argument")))
                .collect::<Result<_, _>>()?,
            clock,
        }),
        _ if eq.lhs.len() != 1 => Err(err("several variables defined by a non-call")),
        Expr::Fby(e0, e1) => match (e0.as_slice(), e1.as_slice()) {
            ([a], [b]) => Ok(NEquation::Fby {
                var: eq.lhs[0].clone(),
                init: to_nexpr(a).ok_or_else(|| err("nested fby operand"))?,
                next: to_nexpr(b).ok_or_else(|| err("nested fby operand"))?,
                clock,
            }),
            _ => Err(err("tuple fby")),
        },
        e => Ok(NEquation::Def {
            var: eq.lhs[0].clone(),
            rhs: to_ncexpr(e).ok_or_else(|| err("nested control expression"))?,
            clock,
        }),
    }
}

fn to_nexpr(e: &Expr) -> Option<NExpr> {
    Some(match e {
        Expr::Const(c) => NExpr::Const(*c),
        Expr::Var(x) => NExpr::Var(x.clone()),
        Expr::Unop(op, e) => NExpr::Unop(*op, Box::new(to_nexpr(e)?)),
        Expr::Binop(op, a, b) => NExpr::Binop(*op, Box::new(to_nexpr(a)?), Box::new(to_nexpr(b)?)),
        Expr::When(es, x, k) => match es.as_slice() {
            [e] => NExpr::When(Box::new(to_nexpr(e)?), x.clone(), *k),
            _ => return None,
        },
        _ => return None,
    })
}

fn to_ncexpr(e: &Expr) -> Option<NCExpr> {
    Some(match e {
        Expr::Merge(x, t, f) => match (t.as_slice(), f.as_slice()) {
            ([t], [f]) => NCExpr::Merge(x.clone(), Box::new(to_ncexpr(t)?), Box::new(to_ncexpr(f)?)),
            _ => return None,
        },
        Expr::Ite(c, t, f) => match (t.as_slice(), f.as_slice()) {
            ([t], [f]) => NCExpr::Ite(to_nexpr(c)?, Box::new(to_ncexpr(t)?), Box::new(to_ncexpr(f)?)),
            _ => return None,
        },
        e => NCExpr::Exp(to_nexpr(e)?),
    })
}
