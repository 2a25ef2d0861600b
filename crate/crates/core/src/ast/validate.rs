//! Well-formedness checks on programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{infer_clocks, BinOp, Body, ClockError, Expr, Ident, NEquation, Node, Program, UnOp, ValueType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    DuplicateNode { node: Ident },
    DuplicateDeclaration { node: Ident, var: Ident },
    DuplicateDefinition { node: Ident, var: Ident },
    InputRedefined { node: Ident, var: Ident },
    Undefined { node: Ident, var: Ident },
    FreeVariable { node: Ident, var: Ident },
    UnknownNode { node: Ident, callee: Ident },
    RecursiveCall { cycle: Vec<Ident> },
    ArityMismatch { node: Ident, message: String },
    TypeMismatch { node: Ident, message: String },
    NonConstantFby { node: Ident, var: Ident },
    Clock(ClockError),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Diagnostic::*;
        match self {
            DuplicateNode { node } => write!(f, "node {} is declared more than once", node),
            DuplicateDeclaration { node, var } => {
                write!(f, "in node {}: {} is declared more than once", node, var)
            }
            DuplicateDefinition { node, var } => {
                write!(f, "in node {}: {} is defined more than once", node, var)
            }
            InputRedefined { node, var } => {
                write!(f, "in node {}: input {} is defined by an equation", node, var)
            }
            Undefined { node, var } => write!(f, "in node {}: {} has no defining equation", node, var),
            FreeVariable { node, var } => write!(f, "in node {}: {} is not declared", node, var),
            UnknownNode { node, callee } => write!(f, "in node {}: call to unknown node {}", node, callee),
            RecursiveCall { cycle } => write!(f, "recursive call cycle: {}", cycle.join(" -> ")),
            ArityMismatch { node, message } => write!(f, "in node {}: arity mismatch: {}", node, message),
            TypeMismatch { node, message } => write!(f, "in node {}: type mismatch: {}", node, message),
            NonConstantFby { node, var } => {
                write!(f, "in node {}: fby defining {} has a non-constant initial value", node, var)
            }
            Clock(e) => write!(f, "{}", e),
        }
    }
}

/// Checks every node and program invariant, returning one diagnostic per
/// violation.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for n in &p.nodes {
        if !seen.insert(n.name.as_str()) {
            out.push(Diagnostic::DuplicateNode { node: n.name.clone() });
        }
    }
    let recursive = match p.topological_order() {
        Ok(_) => false,
        Err(cycle) => {
            out.push(Diagnostic::RecursiveCall { cycle });
            true
        }
    };
    for n in &p.nodes {
        let before = out.len();
        structure(p, n, &mut out);
        if out.len() == before && !recursive {
            if let Err(d) = check_value_types(p, n) {
                out.push(d);
            } else if let Err(e) = infer_clocks(p, n) {
                out.push(Diagnostic::Clock(e));
            }
        }
    }
    out
}

/// Additionally requires every `fby` equation of an NLustre node to have a
/// constant initial value.
pub fn validate_strict_nlustre(p: &Program) -> Vec<Diagnostic> {
    let mut out = validate(p);
    for n in &p.nodes {
        if let Body::NLustre(eqs) = &n.body {
            for eq in eqs {
                if let NEquation::Fby { var, init, .. } = eq {
                    if init.as_constant().is_none() {
                        out.push(Diagnostic::NonConstantFby { node: n.name.clone(), var: var.clone() });
                    }
                }
            }
        }
    }
    out
}

fn structure(p: &Program, n: &Node, out: &mut Vec<Diagnostic>) {
    let node = || n.name.clone();
    let mut declared = BTreeSet::new();
    for d in n.decls() {
        if !declared.insert(d.name.clone()) {
            out.push(Diagnostic::DuplicateDeclaration { node: node(), var: d.name.clone() });
        }
        if let Some(ck) = &d.clock {
            for x in ck.fv() {
                if n.decl(&x).is_none() {
                    out.push(Diagnostic::FreeVariable { node: node(), var: x });
                }
            }
        }
    }
    let inputs: BTreeSet<&Ident> = n.inputs.iter().map(|d| &d.name).collect();

    let mut defined: BTreeMap<Ident, usize> = BTreeMap::new();
    let defs: Vec<Ident> = match &n.body {
        Body::Lustre(eqs) => eqs.iter().flat_map(|e| e.lhs.clone()).collect(),
        Body::NLustre(eqs) => eqs.iter().flat_map(|e| e.defined().into_iter().cloned()).collect(),
    };
    for x in defs {
        *defined.entry(x).or_default() += 1;
    }
    for (x, count) in &defined {
        if inputs.contains(x) {
            out.push(Diagnostic::InputRedefined { node: node(), var: x.clone() });
        } else if !declared.contains(x) {
            out.push(Diagnostic::FreeVariable { node: node(), var: x.clone() });
        } else if *count > 1 {
            out.push(Diagnostic::DuplicateDefinition { node: node(), var: x.clone() });
        }
    }
    for d in n.outputs.iter().chain(&n.locals) {
        if !defined.contains_key(&d.name) {
            out.push(Diagnostic::Undefined { node: node(), var: d.name.clone() });
        }
    }
    let used: BTreeSet<Ident> = n.fv();
    for x in used {
        if !declared.contains(&x) && !defined.contains_key(&x) {
            out.push(Diagnostic::FreeVariable { node: node(), var: x });
        }
    }
    let mut unknown = BTreeSet::new();
    for f in n.callees() {
        if p.node(&f).is_none() && unknown.insert(f.clone()) {
            out.push(Diagnostic::UnknownNode { node: node(), callee: f });
        }
    }
}

struct TypeCheck<'a> {
    p: &'a Program,
    node: &'a Node,
    types: BTreeMap<Ident, ValueType>,
}

impl<'a> TypeCheck<'a> {
    fn ty(&self, message: String) -> Diagnostic {
        Diagnostic::TypeMismatch { node: self.node.name.clone(), message }
    }

    fn arity(&self, message: String) -> Diagnostic {
        Diagnostic::ArityMismatch { node: self.node.name.clone(), message }
    }

    fn var(&self, x: &str) -> Result<ValueType, Diagnostic> {
        self.types
            .get(x)
            .copied()
            .ok_or_else(|| Diagnostic::FreeVariable { node: self.node.name.clone(), var: x.to_string() })
    }

    fn bool_var(&self, x: &str, ctx: &str) -> Result<(), Diagnostic> {
        match self.var(x)? {
            ValueType::Bool => Ok(()),
            t => Err(self.ty(format!("{} {} has type {}, expected bool", ctx, x, t))),
        }
    }

    fn single(&self, e: &Expr) -> Result<ValueType, Diagnostic> {
        let ts = self.expr(e)?;
        match ts.as_slice() {
            [t] => Ok(*t),
            _ => Err(self.arity(format!("expected a single flow, found {}", ts.len()))),
        }
    }

    fn list(&self, es: &[Expr]) -> Result<Vec<ValueType>, Diagnostic> {
        let mut out = Vec::new();
        for e in es {
            out.extend(self.expr(e)?);
        }
        Ok(out)
    }

    fn same(&self, a: &[ValueType], b: &[ValueType], ctx: &str) -> Result<(), Diagnostic> {
        if a.len() != b.len() {
            return Err(self.arity(format!("{}: {} flows against {}", ctx, a.len(), b.len())));
        }
        if a != b {
            return Err(self.ty(format!("{}: {:?} against {:?}", ctx, a, b)));
        }
        Ok(())
    }

    fn expr(&self, e: &Expr) -> Result<Vec<ValueType>, Diagnostic> {
        match e {
            Expr::Const(c) => Ok(vec![c.value_type()]),
            Expr::Var(x) => Ok(vec![self.var(x)?]),
            Expr::Unop(op, e) => {
                let t = self.single(e)?;
                let want = match op {
                    UnOp::Not => ValueType::Bool,
                    UnOp::Neg => ValueType::Int,
                };
                if t != want {
                    return Err(self.ty(format!("operand of {:?} has type {}", op, t)));
                }
                Ok(vec![t])
            }
            Expr::Binop(op, a, b) => {
                let (ta, tb) = (self.single(a)?, self.single(b)?);
                let (operand, result) = op.signature();
                let ok = match operand {
                    Some(t) => ta == t && tb == t,
                    None => ta == tb,
                };
                if !ok {
                    return Err(self.ty(format!("operands of {} have types {} and {}", op.symbol(), ta, tb)));
                }
                debug_assert!(!matches!(op, BinOp::Eq) || result == ValueType::Bool);
                Ok(vec![result])
            }
            Expr::When(es, x, _) => {
                self.bool_var(x, "sampling variable")?;
                self.list(es)
            }
            Expr::Merge(x, ts, fs) => {
                self.bool_var(x, "merge variable")?;
                let (a, b) = (self.list(ts)?, self.list(fs)?);
                self.same(&a, &b, &format!("branches of merge {}", x))?;
                Ok(a)
            }
            Expr::Ite(c, ts, fs) => {
                if self.single(c)? != ValueType::Bool {
                    return Err(self.ty("condition of if is not bool".into()));
                }
                let (a, b) = (self.list(ts)?, self.list(fs)?);
                self.same(&a, &b, "branches of if")?;
                Ok(a)
            }
            Expr::Fby(e0s, es) => {
                let (a, b) = (self.list(e0s)?, self.list(es)?);
                self.same(&a, &b, "operands of fby")?;
                Ok(a)
            }
            Expr::Call(f, args) => {
                let callee = self.p.node(f).ok_or_else(|| Diagnostic::UnknownNode {
                    node: self.node.name.clone(),
                    callee: f.clone(),
                })?;
                let got = self.list(args)?;
                let want: Vec<ValueType> = callee.inputs.iter().map(|d| d.ty).collect();
                self.same(&want, &got, &format!("arguments of {}", f))?;
                Ok(callee.outputs.iter().map(|d| d.ty).collect())
            }
        }
    }
}

/// Checks bool/int typing and flow arities of a node's equations.
pub fn check_value_types(p: &Program, n: &Node) -> Result<(), Diagnostic> {
    let tc = TypeCheck { p, node: n, types: n.value_types() };
    for eq in n.body.lustre_equations() {
        let got = tc.list(&eq.rhs)?;
        let want = eq.lhs.iter().map(|x| tc.var(x)).collect::<Result<Vec<_>, _>>()?;
        tc.same(&want, &got, &format!("equation defining {}", eq.lhs.join(", ")))?;
    }
    Ok(())
}

/// Value types of the flows of `e` inside node `n`.
pub fn expr_value_types(p: &Program, n: &Node, e: &Expr) -> Result<Vec<ValueType>, Diagnostic> {
    TypeCheck { p, node: n, types: n.value_types() }.expr(e)
}
