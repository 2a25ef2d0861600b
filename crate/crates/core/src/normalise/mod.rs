//! Normalisation from Lustre to NLustre: de-nesting and distribution of
//! tuples, then explicit initialisation of `fby`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::{
    clock_of_expr, expr_value_types, infer_clocks, Body, Clock, ClockEnv, ClockError, Decl, Diagnostic,
    Equation, Expr, Ident, Literal, NCExpr, NEquation, NExpr, Node, Program, ValueType,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum NormError {
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error("{0}")]
    Invalid(Diagnostic),
    #[error("in node {node}: {message}")]
    Arity { node: Ident, message: String },
}

/// Generator of identifiers that collide neither with each other nor with
/// any identifier it was seeded with.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    used: BTreeSet<Ident>,
    counter: usize,
}

impl FreshNames {
    pub fn new(used: BTreeSet<Ident>) -> FreshNames {
        FreshNames { used, counter: 0 }
    }

    pub fn for_program(p: &Program) -> FreshNames {
        FreshNames::new(p.identifiers())
    }

    pub fn fresh(&mut self, prefix: &str) -> Ident {
        loop {
            self.counter += 1;
            let name = format!("{}{}", prefix, self.counter);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn declare(name: Ident, ty: ValueType, ck: &Clock) -> Decl {
    let d = Decl::new(name, ty);
    match ck {
        Clock::Base => d,
        ck => d.with_clock(ck.clone()),
    }
}

/// De-nests the equations of one node. Calls, `fby`, `merge` and `if`
/// nested inside other operators are bound to fresh locals; in the control
/// position of an equation they stay in place.
pub struct Normaliser<'a> {
    prog: &'a Program,
    node: &'a Node,
    clocks: ClockEnv,
    fresh: &'a mut FreshNames,
    locals: Vec<Decl>,
    eqs: Vec<NEquation>,
}

impl<'a> Normaliser<'a> {
    pub fn new(
        prog: &'a Program,
        node: &'a Node,
        fresh: &'a mut FreshNames,
    ) -> Result<Normaliser<'a>, NormError> {
        let clocks = infer_clocks(prog, node)?;
        Ok(Normaliser { prog, node, clocks, fresh, locals: Vec::new(), eqs: Vec::new() })
    }

    fn arity(&self, message: String) -> NormError {
        NormError::Arity { node: self.node.name.clone(), message }
    }

    /// Fresh locals for the flows of `e`, with their clocks.
    fn temporaries(&mut self, e: &Expr) -> Result<Vec<(Ident, Clock)>, NormError> {
        let clocks = clock_of_expr(self.prog, &self.clocks, e)?;
        let types = expr_value_types(self.prog, self.node, e).map_err(NormError::Invalid)?;
        let mut out = Vec::new();
        for (ck, ty) in clocks.into_iter().zip(types) {
            let x = self.fresh.fresh("v");
            self.locals.push(declare(x.clone(), ty, &ck));
            out.push((x, ck));
        }
        Ok(out)
    }

    fn simple_list(&mut self, es: &[Expr]) -> Result<Vec<NExpr>, NormError> {
        let mut out = Vec::new();
        for e in es {
            out.extend(self.simple(e)?);
        }
        Ok(out)
    }

    fn single(&mut self, e: &Expr) -> Result<NExpr, NormError> {
        let mut v = self.simple(e)?;
        if v.len() != 1 {
            return Err(self.arity(format!("expected one flow, found {}", v.len())));
        }
        Ok(v.pop().unwrap())
    }

    /// Simple expressions for the flows of `e`.
    pub fn simple(&mut self, e: &Expr) -> Result<Vec<NExpr>, NormError> {
        match e {
            Expr::Const(c) => Ok(vec![NExpr::Const(*c)]),
            Expr::Var(x) => Ok(vec![NExpr::Var(x.clone())]),
            Expr::Unop(op, a) => Ok(vec![NExpr::Unop(*op, Box::new(self.single(a)?))]),
            Expr::Binop(op, a, b) => {
                let (a, b) = (self.single(a)?, self.single(b)?);
                Ok(vec![NExpr::Binop(*op, Box::new(a), Box::new(b))])
            }
            Expr::When(es, x, k) => Ok(self
                .simple_list(es)?
                .into_iter()
                .map(|s| NExpr::When(Box::new(s), x.clone(), *k))
                .collect()),
            Expr::Merge(..) | Expr::Ite(..) => {
                let cs = self.control(e)?;
                let tmps = self.temporaries(e)?;
                for ((x, ck), rhs) in tmps.iter().zip(cs) {
                    self.eqs.push(NEquation::Def { var: x.clone(), rhs, clock: ck.clone() });
                }
                Ok(tmps.into_iter().map(|(x, _)| NExpr::Var(x)).collect())
            }
            Expr::Fby(e0s, es) => {
                let (a, b) = (self.simple_list(e0s)?, self.simple_list(es)?);
                if a.len() != b.len() {
                    return Err(self.arity("fby operands of different arity".into()));
                }
                let tmps = self.temporaries(e)?;
                for ((x, ck), (init, next)) in tmps.iter().zip(a.into_iter().zip(b)) {
                    self.eqs.push(NEquation::Fby { var: x.clone(), init, next, clock: ck.clone() });
                }
                Ok(tmps.into_iter().map(|(x, _)| NExpr::Var(x)).collect())
            }
            Expr::Call(f, args) => {
                let args = self.simple_list(args)?;
                let tmps = self.temporaries(e)?;
                let clock = tmps.first().map(|(_, ck)| ck.clone()).unwrap_or(Clock::Base);
                let vars: Vec<Ident> = tmps.iter().map(|(x, _)| x.clone()).collect();
                self.eqs.push(NEquation::Call { vars: vars.clone(), node: f.clone(), args, clock });
                Ok(vars.into_iter().map(NExpr::Var).collect())
            }
        }
    }

    fn control_list(&mut self, es: &[Expr]) -> Result<Vec<NCExpr>, NormError> {
        let mut out = Vec::new();
        for e in es {
            out.extend(self.control(e)?);
        }
        Ok(out)
    }

    /// Control expressions for the flows of `e`: `merge` and `if` are
    /// distributed over tuples and kept in place.
    pub fn control(&mut self, e: &Expr) -> Result<Vec<NCExpr>, NormError> {
        match e {
            Expr::Merge(x, ts, fs) => {
                let (ts, fs) = (self.control_list(ts)?, self.control_list(fs)?);
                if ts.len() != fs.len() {
                    return Err(self.arity(format!("merge {} branches of different arity", x)));
                }
                Ok(ts
                    .into_iter()
                    .zip(fs)
                    .map(|(t, f)| NCExpr::Merge(x.clone(), Box::new(t), Box::new(f)))
                    .collect())
            }
            Expr::Ite(c, ts, fs) => {
                let c = self.single(c)?;
                let (ts, fs) = (self.control_list(ts)?, self.control_list(fs)?);
                if ts.len() != fs.len() {
                    return Err(self.arity("if branches of different arity".into()));
                }
                Ok(ts
                    .into_iter()
                    .zip(fs)
                    .map(|(t, f)| NCExpr::Ite(c.clone(), Box::new(t), Box::new(f)))
                    .collect())
            }
            e => Ok(self.simple(e)?.into_iter().map(NCExpr::Exp).collect()),
        }
    }

    fn clock_of(&self, x: &str) -> Clock {
        self.clocks.get(x).cloned().unwrap_or(Clock::Base)
    }

    /// Equations defining the variables of `eq`, preceded by the auxiliary
    /// equations they need.
    pub fn equation(&mut self, eq: &Equation) -> Result<(), NormError> {
        let outputs_of = |f: &str| self.prog.output_arity(f);
        let mut lhs = eq.lhs.iter();
        for e in &eq.rhs {
            let k = e
                .arity(&outputs_of)
                .ok_or_else(|| self.arity(format!("cannot count the flows of {:?}", e)))?;
            let xs: Vec<Ident> = lhs.by_ref().take(k).cloned().collect();
            if xs.len() != k {
                return Err(self.arity(format!("equation for {} has too many flows", eq.lhs.join(", "))));
            }
            match e {
                Expr::Call(f, args) => {
                    let args = self.simple_list(args)?;
                    let clock = self.clock_of(&xs[0]);
                    self.eqs.push(NEquation::Call { vars: xs, node: f.clone(), args, clock });
                }
                Expr::Fby(e0s, es) => {
                    let (a, b) = (self.simple_list(e0s)?, self.simple_list(es)?);
                    for (x, (init, next)) in xs.into_iter().zip(a.into_iter().zip(b)) {
                        let clock = self.clock_of(&x);
                        self.eqs.push(NEquation::Fby { var: x, init, next, clock });
                    }
                }
                e => {
                    let cs = self.control(e)?;
                    for (x, rhs) in xs.into_iter().zip(cs) {
                        let clock = self.clock_of(&x);
                        self.eqs.push(NEquation::Def { var: x, rhs, clock });
                    }
                }
            }
        }
        if lhs.next().is_some() {
            return Err(self.arity(format!("equation for {} has too few flows", eq.lhs.join(", "))));
        }
        Ok(())
    }

    /// The new locals and all equations produced so far.
    pub fn finish(self) -> (Vec<Decl>, Vec<NEquation>) {
        (self.locals, self.eqs)
    }
}

pub fn normalize_node(p: &Program, n: &Node, fresh: &mut FreshNames) -> Result<Node, NormError> {
    let mut norm = Normaliser::new(p, n, fresh)?;
    for eq in n.body.lustre_equations() {
        norm.equation(&eq)?;
    }
    let (temps, eqs) = norm.finish();
    let mut locals = n.locals.clone();
    locals.extend(temps);
    Ok(Node { locals, body: Body::NLustre(eqs), ..n.clone() })
}

/// De-nests every node. Interfaces are unchanged; locals are extended.
pub fn normalize_program(p: &Program) -> Result<Program, NormError> {
    let mut fresh = FreshNames::for_program(p);
    let nodes = p.nodes.iter().map(|n| normalize_node(p, n, &mut fresh)).collect::<Result<_, _>>()?;
    Ok(Program::new(nodes))
}

/// Makes every `fby` head constant: `x = e0 fby e` becomes
/// `xinit = true fby false; px = c fby e; x = if xinit then e0 else px`,
/// where `c` is the default value of `x`'s type.
pub fn fby_init(p: &Program) -> Program {
    let mut fresh = FreshNames::for_program(p);
    let nodes = p.nodes.iter().map(|n| fby_init_node(n, &mut fresh)).collect();
    Program::new(nodes)
}

pub fn fby_init_node(n: &Node, fresh: &mut FreshNames) -> Node {
    let Body::NLustre(eqs) = &n.body else { return n.clone() };
    let mut locals = n.locals.clone();
    let mut out = Vec::new();
    for eq in eqs {
        match eq {
            NEquation::Fby { var, init, next, clock } if init.as_constant().is_none() => {
                let ty = n.decl(var).map(|d| d.ty).unwrap_or(ValueType::Int);
                let xinit = fresh.fresh("xinit");
                let px = fresh.fresh("px");
                locals.push(declare(xinit.clone(), ValueType::Bool, clock));
                locals.push(declare(px.clone(), ty, clock));
                out.push(NEquation::Fby {
                    var: xinit.clone(),
                    init: NExpr::sampled_const(Literal::Bool(true), clock),
                    next: NExpr::sampled_const(Literal::Bool(false), clock),
                    clock: clock.clone(),
                });
                out.push(NEquation::Fby {
                    var: px.clone(),
                    init: NExpr::sampled_const(ty.default_literal(), clock),
                    next: next.clone(),
                    clock: clock.clone(),
                });
                out.push(NEquation::Def {
                    var: var.clone(),
                    rhs: NCExpr::Ite(
                        NExpr::Var(xinit),
                        Box::new(NCExpr::Exp(init.clone())),
                        Box::new(NCExpr::Exp(NExpr::Var(px))),
                    ),
                    clock: clock.clone(),
                });
            }
            eq => out.push(eq.clone()),
        }
    }
    Node { locals, body: Body::NLustre(out), ..n.clone() }
}
