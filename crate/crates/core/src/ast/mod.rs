//! Abstract syntax for Lustre and NLustre programs.
//!
//! Lustre equations define a list of variables from a list of expressions
//! (`x̄ = ē`). NLustre equations are un-nested and un-tupled, carry a
//! mandatory clock, and only allow `fby` and node calls at the top of an
//! equation.

mod clocks;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use clocks::{clock_of_expr, infer_clocks, ClockEnv, ClockError};
pub use validate::{check_value_types, expr_value_types, validate, validate_strict_nlustre, Diagnostic};

pub type Ident = String;

/// Source position of a syntax element.
///
/// Spans never take part in structural equality: two trees that differ only
/// in where they were read from compare equal.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl Span {
    pub fn new(line: usize, col_start: usize, col_end: usize) -> Span {
        debug_assert!(col_start <= col_end);
        Span { line, col_start, col_end }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}", self.line, self.col_start, self.col_end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueType {
    Bool,
    Int,
}

impl ValueType {
    /// Value used where a type-correct placeholder is needed.
    pub fn default_literal(self) -> Literal {
        match self {
            ValueType::Bool => Literal::Bool(false),
            ValueType::Int => Literal::Int(0),
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueType::Bool => "bool",
            ValueType::Int => "int",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    Bool(bool),
    Int(i64),
}

impl Literal {
    pub fn value_type(self) -> ValueType {
        match self {
            Literal::Bool(_) => ValueType::Bool,
            Literal::Int(_) => ValueType::Int,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(b) => write!(f, "{}", b),
            Literal::Int(i) => write!(f, "{}", i),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "div",
            BinOp::Mod => "mod",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }

    /// Operand and result value types.
    pub fn signature(self) -> (Option<ValueType>, ValueType) {
        use BinOp::*;
        match self {
            And | Or => (Some(ValueType::Bool), ValueType::Bool),
            Add | Sub | Mul | Div | Mod => (Some(ValueType::Int), ValueType::Int),
            // `=` and `<>` accept either type, as long as both sides agree.
            Eq | Ne => (None, ValueType::Bool),
            Lt | Le | Gt | Ge => (Some(ValueType::Int), ValueType::Bool),
        }
    }
}

/// A clock: the base clock of a node, or a sub-clock sampled on a
/// variable taking a given boolean value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clock {
    Base,
    On(Box<Clock>, Ident, bool),
}

impl Clock {
    pub fn on(self, x: impl Into<Ident>, k: bool) -> Clock {
        Clock::On(Box::new(self), x.into(), k)
    }

    pub fn depth(&self) -> usize {
        match self {
            Clock::Base => 0,
            Clock::On(ck, _, _) => 1 + ck.depth(),
        }
    }

    /// The `(variable, value)` samplings from the base clock outwards.
    pub fn samplings(&self) -> Vec<(&Ident, bool)> {
        let mut out = Vec::new();
        let mut ck = self;
        while let Clock::On(parent, x, k) = ck {
            out.push((x, *k));
            ck = parent;
        }
        out.reverse();
        out
    }

    pub fn fv(&self) -> BTreeSet<Ident> {
        self.samplings().into_iter().map(|(x, _)| x.clone()).collect()
    }
}

/// Lustre expressions. List-valued positions hold tuples of flows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Literal),
    Var(Ident),
    Unop(UnOp, Box<Expr>),
    Binop(BinOp, Box<Expr>, Box<Expr>),
    When(Vec<Expr>, Ident, bool),
    Merge(Ident, Vec<Expr>, Vec<Expr>),
    Ite(Box<Expr>, Vec<Expr>, Vec<Expr>),
    Fby(Vec<Expr>, Vec<Expr>),
    Call(Ident, Vec<Expr>),
}

impl Expr {
    pub fn var(x: impl Into<Ident>) -> Expr {
        Expr::Var(x.into())
    }

    pub fn int(i: i64) -> Expr {
        Expr::Const(Literal::Int(i))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Const(Literal::Bool(b))
    }

    pub fn unop(op: UnOp, e: Expr) -> Expr {
        Expr::Unop(op, Box::new(e))
    }

    pub fn binop(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binop(op, Box::new(a), Box::new(b))
    }

    pub fn fv(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_fv(&mut out);
        out
    }

    pub(crate) fn collect_fv(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Unop(_, e) => e.collect_fv(out),
            Expr::Binop(_, a, b) => {
                a.collect_fv(out);
                b.collect_fv(out);
            }
            Expr::When(es, x, _) => {
                es.iter().for_each(|e| e.collect_fv(out));
                out.insert(x.clone());
            }
            Expr::Merge(x, ts, fs) => {
                out.insert(x.clone());
                ts.iter().chain(fs).for_each(|e| e.collect_fv(out));
            }
            Expr::Ite(c, ts, fs) => {
                c.collect_fv(out);
                ts.iter().chain(fs).for_each(|e| e.collect_fv(out));
            }
            Expr::Fby(e0s, es) => e0s.iter().chain(es).for_each(|e| e.collect_fv(out)),
            Expr::Call(_, args) => args.iter().for_each(|e| e.collect_fv(out)),
        }
    }

    /// Variables read at the current instant: everything except the delayed
    /// operand of each `fby`.
    pub fn instant_fv(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Unop(_, e) => e.instant_fv(out),
            Expr::Binop(_, a, b) => {
                a.instant_fv(out);
                b.instant_fv(out);
            }
            Expr::When(es, x, _) => {
                es.iter().for_each(|e| e.instant_fv(out));
                out.insert(x.clone());
            }
            Expr::Merge(x, ts, fs) => {
                out.insert(x.clone());
                ts.iter().chain(fs).for_each(|e| e.instant_fv(out));
            }
            Expr::Ite(c, ts, fs) => {
                c.instant_fv(out);
                ts.iter().chain(fs).for_each(|e| e.instant_fv(out));
            }
            Expr::Fby(e0s, _) => e0s.iter().for_each(|e| e.instant_fv(out)),
            Expr::Call(_, args) => args.iter().for_each(|e| e.instant_fv(out)),
        }
    }

    /// Number of flows denoted, given the output arity of each callee.
    pub fn arity(&self, outputs_of: &dyn Fn(&str) -> Option<usize>) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Unop(..) | Expr::Binop(..) => Some(1),
            Expr::When(es, _, _) => list_arity(es, outputs_of),
            Expr::Merge(_, ts, _) | Expr::Ite(_, ts, _) => list_arity(ts, outputs_of),
            Expr::Fby(e0s, _) => list_arity(e0s, outputs_of),
            Expr::Call(f, _) => outputs_of(f),
        }
    }

    /// Calls every node-call name in the expression.
    pub fn for_each_call(&self, f: &mut dyn FnMut(&Ident, &[Expr])) {
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Unop(_, e) => e.for_each_call(f),
            Expr::Binop(_, a, b) => {
                a.for_each_call(f);
                b.for_each_call(f);
            }
            Expr::When(es, _, _) => es.iter().for_each(|e| e.for_each_call(f)),
            Expr::Merge(_, ts, fs) => ts.iter().chain(fs).for_each(|e| e.for_each_call(f)),
            Expr::Ite(c, ts, fs) => {
                c.for_each_call(f);
                ts.iter().chain(fs).for_each(|e| e.for_each_call(f));
            }
            Expr::Fby(e0s, es) => e0s.iter().chain(es).for_each(|e| e.for_each_call(f)),
            Expr::Call(g, args) => {
                f(g, args);
                args.iter().for_each(|e| e.for_each_call(f));
            }
        }
    }
}

pub fn list_arity(es: &[Expr], outputs_of: &dyn Fn(&str) -> Option<usize>) -> Option<usize> {
    es.iter().map(|e| e.arity(outputs_of)).sum()
}

/// A Lustre equation `x̄ = ē`, optionally annotated with a clock.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Vec<Ident>,
    pub rhs: Vec<Expr>,
    pub clock: Option<Clock>,
    pub span: Span,
}

impl Equation {
    pub fn new(lhs: Vec<Ident>, rhs: Vec<Expr>) -> Equation {
        Equation { lhs, rhs, clock: None, span: Span::default() }
    }

    pub fn simple(x: impl Into<Ident>, e: Expr) -> Equation {
        Equation::new(vec![x.into()], vec![e])
    }

    pub fn dv(&self) -> BTreeSet<Ident> {
        self.lhs.iter().cloned().collect()
    }

    pub fn fv(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.rhs.iter().for_each(|e| e.collect_fv(&mut out));
        if let Some(ck) = &self.clock {
            out.extend(ck.fv());
        }
        for x in &self.lhs {
            out.remove(x);
        }
        out
    }
}

/// NLustre simple expressions: no tuples, no control flow, no calls.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NExpr {
    Const(Literal),
    Var(Ident),
    Unop(UnOp, Box<NExpr>),
    Binop(BinOp, Box<NExpr>, Box<NExpr>),
    When(Box<NExpr>, Ident, bool),
}

impl NExpr {
    pub fn fv(&self, out: &mut BTreeSet<Ident>) {
        match self {
            NExpr::Const(_) => {}
            NExpr::Var(x) => {
                out.insert(x.clone());
            }
            NExpr::Unop(_, e) => e.fv(out),
            NExpr::Binop(_, a, b) => {
                a.fv(out);
                b.fv(out);
            }
            NExpr::When(e, x, _) => {
                e.fv(out);
                out.insert(x.clone());
            }
        }
    }

    /// The literal of a constant, possibly sampled by `when`s.
    pub fn as_constant(&self) -> Option<Literal> {
        match self {
            NExpr::Const(c) => Some(*c),
            NExpr::When(e, _, _) => e.as_constant(),
            _ => None,
        }
    }

    /// A constant sampled down to `ck`.
    pub fn sampled_const(c: Literal, ck: &Clock) -> NExpr {
        ck.samplings().into_iter().fold(NExpr::Const(c), |e, (x, k)| NExpr::When(Box::new(e), x.clone(), k))
    }

    pub fn to_lustre(&self) -> Expr {
        match self {
            NExpr::Const(c) => Expr::Const(*c),
            NExpr::Var(x) => Expr::Var(x.clone()),
            NExpr::Unop(op, e) => Expr::unop(*op, e.to_lustre()),
            NExpr::Binop(op, a, b) => Expr::binop(*op, a.to_lustre(), b.to_lustre()),
            NExpr::When(e, x, k) => Expr::When(vec![e.to_lustre()], x.clone(), *k),
        }
    }
}

/// NLustre control expressions: `merge` and `if` only above simple
/// expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NCExpr {
    Merge(Ident, Box<NCExpr>, Box<NCExpr>),
    Ite(NExpr, Box<NCExpr>, Box<NCExpr>),
    Exp(NExpr),
}

impl NCExpr {
    pub fn fv(&self, out: &mut BTreeSet<Ident>) {
        match self {
            NCExpr::Merge(x, t, f) => {
                out.insert(x.clone());
                t.fv(out);
                f.fv(out);
            }
            NCExpr::Ite(c, t, f) => {
                c.fv(out);
                t.fv(out);
                f.fv(out);
            }
            NCExpr::Exp(e) => e.fv(out),
        }
    }

    pub fn to_lustre(&self) -> Expr {
        match self {
            NCExpr::Merge(x, t, f) => Expr::Merge(x.clone(), vec![t.to_lustre()], vec![f.to_lustre()]),
            NCExpr::Ite(c, t, f) => {
                Expr::Ite(Box::new(c.to_lustre()), vec![t.to_lustre()], vec![f.to_lustre()])
            }
            NCExpr::Exp(e) => e.to_lustre(),
        }
    }
}

/// NLustre equations, each with its clock.
///
/// After the de-nesting pass, the initial operand of a `fby` equation may
/// still be any simple expression; the explicit-initialisation pass turns
/// it into a constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NEquation {
    Def { var: Ident, rhs: NCExpr, clock: Clock },
    Fby { var: Ident, init: NExpr, next: NExpr, clock: Clock },
    Call { vars: Vec<Ident>, node: Ident, args: Vec<NExpr>, clock: Clock },
}

impl NEquation {
    pub fn clock(&self) -> &Clock {
        match self {
            NEquation::Def { clock, .. } | NEquation::Fby { clock, .. } | NEquation::Call { clock, .. } => {
                clock
            }
        }
    }

    pub fn dv(&self) -> BTreeSet<Ident> {
        match self {
            NEquation::Def { var, .. } | NEquation::Fby { var, .. } => [var.clone()].into(),
            NEquation::Call { vars, .. } => vars.iter().cloned().collect(),
        }
    }

    pub fn defined(&self) -> Vec<&Ident> {
        match self {
            NEquation::Def { var, .. } | NEquation::Fby { var, .. } => vec![var],
            NEquation::Call { vars, .. } => vars.iter().collect(),
        }
    }

    pub fn fv(&self) -> BTreeSet<Ident> {
        let mut out = self.clock().fv();
        match self {
            NEquation::Def { rhs, .. } => rhs.fv(&mut out),
            NEquation::Fby { init, next, .. } => {
                init.fv(&mut out);
                next.fv(&mut out);
            }
            NEquation::Call { args, .. } => args.iter().for_each(|a| a.fv(&mut out)),
        }
        for x in self.dv() {
            out.remove(&x);
        }
        out
    }

    /// The Lustre equation with the same meaning.
    pub fn to_lustre(&self) -> Equation {
        let (lhs, rhs, clock) = match self {
            NEquation::Def { var, rhs, clock } => (vec![var.clone()], rhs.to_lustre(), clock),
            NEquation::Fby { var, init, next, clock } => {
                (vec![var.clone()], Expr::Fby(vec![init.to_lustre()], vec![next.to_lustre()]), clock)
            }
            NEquation::Call { vars, node, args, clock } => {
                (vars.clone(), Expr::Call(node.clone(), args.iter().map(NExpr::to_lustre).collect()), clock)
            }
        };
        Equation { lhs, rhs: vec![rhs], clock: Some(clock.clone()), span: Span::default() }
    }
}

/// A variable declaration: name, value type and optional declared clock.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: Ident,
    pub ty: ValueType,
    pub clock: Option<Clock>,
}

impl Decl {
    pub fn new(name: impl Into<Ident>, ty: ValueType) -> Decl {
        Decl { name: name.into(), ty, clock: None }
    }

    pub fn with_clock(mut self, ck: Clock) -> Decl {
        self.clock = Some(ck);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Lustre,
    NLustre,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Lustre => "Lustre",
            Dialect::NLustre => "NLustre",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Lustre(Vec<Equation>),
    NLustre(Vec<NEquation>),
}

impl Body {
    pub fn dialect(&self) -> Dialect {
        match self {
            Body::Lustre(_) => Dialect::Lustre,
            Body::NLustre(_) => Dialect::NLustre,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Body::Lustre(eqs) => eqs.len(),
            Body::NLustre(eqs) => eqs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lustre view of the equations (NLustre equations are embedded).
    pub fn lustre_equations(&self) -> Vec<Equation> {
        match self {
            Body::Lustre(eqs) => eqs.clone(),
            Body::NLustre(eqs) => eqs.iter().map(NEquation::to_lustre).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: Ident,
    pub inputs: Vec<Decl>,
    pub outputs: Vec<Decl>,
    pub locals: Vec<Decl>,
    pub body: Body,
    pub span: Span,
}

impl Node {
    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.inputs.iter().chain(&self.outputs).chain(&self.locals)
    }

    pub fn decl(&self, x: &str) -> Option<&Decl> {
        self.decls().find(|d| d.name == x)
    }

    pub fn value_types(&self) -> BTreeMap<Ident, ValueType> {
        self.decls().map(|d| (d.name.clone(), d.ty)).collect()
    }

    /// Callee names in equation order, with repetitions.
    pub fn callees(&self) -> Vec<Ident> {
        let mut out = Vec::new();
        match &self.body {
            Body::Lustre(eqs) => {
                for eq in eqs {
                    for e in &eq.rhs {
                        e.for_each_call(&mut |f, _| out.push(f.clone()));
                    }
                }
            }
            Body::NLustre(eqs) => {
                for eq in eqs {
                    if let NEquation::Call { node, .. } = eq {
                        out.push(node.clone());
                    }
                }
            }
        }
        out
    }

    pub fn dv(&self) -> BTreeSet<Ident> {
        match &self.body {
            Body::Lustre(eqs) => eqs.iter().flat_map(Equation::dv).collect(),
            Body::NLustre(eqs) => eqs.iter().flat_map(NEquation::dv).collect(),
        }
    }

    pub fn fv(&self) -> BTreeSet<Ident> {
        match &self.body {
            Body::Lustre(eqs) => eqs.iter().flat_map(Equation::fv).collect(),
            Body::NLustre(eqs) => eqs.iter().flat_map(NEquation::fv).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub nodes: Vec<Node>,
}

impl Program {
    pub fn new(nodes: Vec<Node>) -> Program {
        Program { nodes }
    }

    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn output_arity(&self, name: &str) -> Option<usize> {
        self.node(name).map(|n| n.outputs.len())
    }

    /// Node name to the set of nodes it calls.
    pub fn call_graph(&self) -> BTreeMap<Ident, BTreeSet<Ident>> {
        self.nodes.iter().map(|n| (n.name.clone(), n.callees().into_iter().collect())).collect()
    }

    /// Nodes ordered so that every callee precedes its callers, or the
    /// names on a call cycle.
    pub fn topological_order(&self) -> Result<Vec<&Node>, Vec<Ident>> {
        let graph = self.call_graph();
        let mut state: BTreeMap<Ident, u8> = BTreeMap::new();
        let mut order = Vec::new();
        let mut stack: Vec<Ident> = Vec::new();

        fn visit<'a>(
            p: &'a Program,
            graph: &BTreeMap<Ident, BTreeSet<Ident>>,
            name: &str,
            state: &mut BTreeMap<Ident, u8>,
            stack: &mut Vec<Ident>,
            order: &mut Vec<&'a Node>,
        ) -> Result<(), Vec<Ident>> {
            match state.get(name) {
                Some(2) => return Ok(()),
                Some(1) => {
                    let from = stack.iter().position(|s| s == name).unwrap_or(0);
                    let mut cycle = stack[from..].to_vec();
                    cycle.push(name.to_string());
                    return Err(cycle);
                }
                _ => {}
            }
            let Some(node) = p.node(name) else { return Ok(()) };
            state.insert(name.to_string(), 1);
            stack.push(name.to_string());
            for callee in &graph[name] {
                visit(p, graph, callee, state, stack, order)?;
            }
            stack.pop();
            state.insert(name.to_string(), 2);
            order.push(node);
            Ok(())
        }

        for n in &self.nodes {
            visit(self, &graph, &n.name, &mut state, &mut stack, &mut order)?;
        }
        Ok(order)
    }

    /// Every identifier used anywhere in the program.
    pub fn identifiers(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        for n in &self.nodes {
            out.insert(n.name.clone());
            for d in n.decls() {
                out.insert(d.name.clone());
            }
            out.extend(n.fv());
            out.extend(n.dv());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fv_of_constant_is_empty() {
        assert!(Expr::int(5).fv().is_empty());
    }

    #[test]
    fn fv_of_when_includes_sampling_variable() {
        let e = Expr::When(vec![Expr::var("i")], "x".into(), true);
        assert_eq!(e.fv(), ["i".to_string(), "x".to_string()].into());
    }

    #[test]
    fn fv_of_equation_removes_defined_variables() {
        let eq = Equation::simple("x", Expr::binop(BinOp::Add, Expr::var("x"), Expr::var("y")));
        assert_eq!(eq.fv(), ["y".to_string()].into());
        assert!(eq.dv().is_disjoint(&eq.fv()));
    }

    #[test]
    fn dv_of_tuple_equation() {
        let eq =
            Equation::new(vec!["a".into(), "b".into()], vec![Expr::Call("f".into(), vec![Expr::var("e")])]);
        assert_eq!(eq.dv(), ["a".to_string(), "b".to_string()].into());
        let fby = Equation::simple("x", Expr::Fby(vec![Expr::int(0)], vec![Expr::var("e")]));
        assert_eq!(fby.dv(), ["x".to_string()].into());
    }

    #[test]
    fn nlustre_fv_includes_clock_variables() {
        let eq = NEquation::Fby {
            var: "x".into(),
            init: NExpr::Const(Literal::Int(0)),
            next: NExpr::Var("y".into()),
            clock: Clock::Base.on("c", true),
        };
        assert_eq!(eq.fv(), ["c".to_string(), "y".to_string()].into());
    }

    #[test]
    fn clock_samplings_run_from_base_outwards() {
        let ck = Clock::Base.on("a", true).on("b", false);
        assert_eq!(ck.samplings(), vec![(&"a".to_string(), true), (&"b".to_string(), false)]);
        assert_eq!(ck.depth(), 2);
    }

    #[test]
    fn sampled_constant_follows_clock() {
        let ck = Clock::Base.on("c", false);
        let e = NExpr::sampled_const(Literal::Bool(false), &ck);
        assert_eq!(e, NExpr::When(Box::new(NExpr::Const(Literal::Bool(false))), "c".into(), false));
        assert_eq!(e.as_constant(), Some(Literal::Bool(false)));
    }
}
