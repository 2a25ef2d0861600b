//! Clock inference.
//!
//! Every flow of a node lives on a clock derived from the node's base clock.
//! Declared clocks are taken as given; undeclared locals receive a clock
//! variable that is resolved by unification through the operators. Locals
//! whose clock stays unconstrained default to the base clock.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Clock, Equation, Expr, Ident, Node, Program};

pub type ClockEnv = BTreeMap<Ident, Clock>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("clock error in node {node}: {message}")]
pub struct ClockError {
    pub node: Ident,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum CTerm {
    Base,
    Var(usize),
    On(Box<CTerm>, Ident, bool),
}

struct Unifier<'a> {
    node: &'a str,
    bindings: Vec<Option<CTerm>>,
}

impl<'a> Unifier<'a> {
    fn fresh(&mut self) -> CTerm {
        self.bindings.push(None);
        CTerm::Var(self.bindings.len() - 1)
    }

    fn err(&self, message: String) -> ClockError {
        ClockError { node: self.node.to_string(), message }
    }

    fn resolve(&self, t: &CTerm) -> CTerm {
        match t {
            CTerm::Var(v) => match &self.bindings[*v] {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            CTerm::On(ck, x, k) => CTerm::On(Box::new(self.resolve(ck)), x.clone(), *k),
            CTerm::Base => CTerm::Base,
        }
    }

    fn occurs(&self, v: usize, t: &CTerm) -> bool {
        match self.resolve(t) {
            CTerm::Var(w) => v == w,
            CTerm::On(ck, _, _) => self.occurs(v, &ck),
            CTerm::Base => false,
        }
    }

    fn unify(&mut self, a: &CTerm, b: &CTerm, what: &dyn Fn() -> String) -> Result<(), ClockError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            _ if a == b => Ok(()),
            (CTerm::Var(v), t) | (t, CTerm::Var(v)) => {
                if self.occurs(*v, t) {
                    return Err(self.err(format!("recursive clock for {}", what())));
                }
                self.bindings[*v] = Some(t.clone());
                Ok(())
            }
            (CTerm::On(c1, x1, k1), CTerm::On(c2, x2, k2)) if x1 == x2 && k1 == k2 => {
                self.unify(c1, c2, what)
            }
            _ => Err(self.err(format!(
                "{}: clocks {} and {} differ",
                what(),
                show(&self.ground(&a)),
                show(&self.ground(&b))
            ))),
        }
    }

    fn ground(&self, t: &CTerm) -> Clock {
        match self.resolve(t) {
            CTerm::Base | CTerm::Var(_) => Clock::Base,
            CTerm::On(ck, x, k) => self.ground(&ck).on(x, k),
        }
    }
}

fn show(ck: &Clock) -> String {
    let mut s = "base".to_string();
    for (x, k) in ck.samplings() {
        s.push_str(if k { " on " } else { " on not " });
        s.push_str(x);
    }
    s
}

fn lift(ck: &Clock) -> CTerm {
    match ck {
        Clock::Base => CTerm::Base,
        Clock::On(c, x, k) => CTerm::On(Box::new(lift(c)), x.clone(), *k),
    }
}

struct Inference<'a> {
    prog: &'a Program,
    vars: BTreeMap<Ident, CTerm>,
    u: Unifier<'a>,
}

impl<'a> Inference<'a> {
    fn var(&self, x: &str) -> Result<CTerm, ClockError> {
        self.vars.get(x).cloned().ok_or_else(|| self.u.err(format!("undeclared variable {}", x)))
    }

    fn expr(&mut self, e: &Expr) -> Result<Vec<CTerm>, ClockError> {
        match e {
            Expr::Const(_) => Ok(vec![CTerm::Base]),
            Expr::Var(x) => Ok(vec![self.var(x)?]),
            Expr::Unop(_, e) => self.expr(e),
            Expr::Binop(op, a, b) => {
                let ca = self.single(a)?;
                let cb = self.single(b)?;
                self.u.unify(&ca, &cb, &|| format!("operands of {}", op.symbol()))?;
                Ok(vec![ca])
            }
            Expr::When(es, x, k) => {
                let cx = self.var(x)?;
                let mut out = Vec::new();
                for c in self.list(es)? {
                    self.u.unify(&c, &cx, &|| format!("operand of when {}", x))?;
                    out.push(CTerm::On(Box::new(cx.clone()), x.clone(), *k));
                }
                Ok(out)
            }
            Expr::Merge(x, ts, fs) => {
                let cx = self.var(x)?;
                let on_t = CTerm::On(Box::new(cx.clone()), x.clone(), true);
                let on_f = CTerm::On(Box::new(cx.clone()), x.clone(), false);
                let cts = self.list(ts)?;
                let cfs = self.list(fs)?;
                if cts.len() != cfs.len() {
                    return Err(self.u.err(format!("merge {} branches of different arity", x)));
                }
                for c in &cts {
                    self.u.unify(c, &on_t, &|| format!("true branch of merge {}", x))?;
                }
                for c in &cfs {
                    self.u.unify(c, &on_f, &|| format!("false branch of merge {}", x))?;
                }
                Ok(vec![cx; cts.len()])
            }
            Expr::Ite(c, ts, fs) => {
                let cc = self.single(c)?;
                let cts = self.list(ts)?;
                let cfs = self.list(fs)?;
                if cts.len() != cfs.len() {
                    return Err(self.u.err("if branches of different arity".into()));
                }
                for ck in cts.iter().chain(&cfs) {
                    self.u.unify(ck, &cc, &|| "branch of if".into())?;
                }
                Ok(vec![cc; cts.len()])
            }
            Expr::Fby(e0s, es) => {
                let c0 = self.list(e0s)?;
                let c1 = self.list(es)?;
                if c0.len() != c1.len() {
                    return Err(self.u.err("fby operands of different arity".into()));
                }
                for (a, b) in c0.iter().zip(&c1) {
                    self.u.unify(a, b, &|| "operands of fby".into())?;
                }
                Ok(c0)
            }
            Expr::Call(f, args) => {
                let callee = self.prog.node(f).ok_or_else(|| self.u.err(format!("unknown node {}", f)))?;
                let cargs = self.list(args)?;
                let ck = match cargs.first() {
                    Some(c) => c.clone(),
                    None => CTerm::Base,
                };
                for c in &cargs[1.min(cargs.len())..] {
                    self.u.unify(c, &ck, &|| format!("arguments of {}", f))?;
                }
                Ok(vec![ck; callee.outputs.len()])
            }
        }
    }

    fn single(&mut self, e: &Expr) -> Result<CTerm, ClockError> {
        let mut cs = self.expr(e)?;
        if cs.len() != 1 {
            return Err(self.u.err(format!("expected a single flow, found {}", cs.len())));
        }
        Ok(cs.pop().unwrap())
    }

    fn list(&mut self, es: &[Expr]) -> Result<Vec<CTerm>, ClockError> {
        let mut out = Vec::new();
        for e in es {
            out.extend(self.expr(e)?);
        }
        Ok(out)
    }

    fn equation(&mut self, eq: &Equation) -> Result<(), ClockError> {
        let cs = self.list(&eq.rhs)?;
        if cs.len() != eq.lhs.len() {
            return Err(self.u.err(format!(
                "equation for {} defines {} variables from {} flows",
                eq.lhs.join(", "),
                eq.lhs.len(),
                cs.len()
            )));
        }
        for (x, c) in eq.lhs.iter().zip(&cs) {
            let cx = self.var(x)?;
            self.u.unify(&cx, c, &|| format!("definition of {}", x))?;
            if let Some(ann) = &eq.clock {
                self.u.unify(&cx, &lift(ann), &|| format!("annotated clock of {}", x))?;
            }
        }
        Ok(())
    }
}

/// Infers the clock of every variable of `node`.
pub fn infer_clocks(prog: &Program, node: &Node) -> Result<ClockEnv, ClockError> {
    let mut inf =
        Inference { prog, vars: BTreeMap::new(), u: Unifier { node: &node.name, bindings: Vec::new() } };
    for d in node.inputs.iter().chain(&node.outputs) {
        if matches!(d.clock, Some(Clock::On(..))) {
            return Err(inf.u.err(format!("interface variable {} must be on the base clock", d.name)));
        }
        inf.vars.insert(d.name.clone(), CTerm::Base);
    }
    for d in &node.locals {
        let t = match &d.clock {
            Some(ck) => lift(ck),
            None => inf.u.fresh(),
        };
        inf.vars.insert(d.name.clone(), t);
    }
    for eq in node.body.lustre_equations() {
        inf.equation(&eq)?;
    }
    let env: ClockEnv = inf.vars.iter().map(|(x, t)| (x.clone(), inf.u.ground(t))).collect();
    check_well_formed(&node.name, &env)?;
    Ok(env)
}

/// Each sampling variable of a clock must itself live on the parent clock.
fn check_well_formed(node: &str, env: &ClockEnv) -> Result<(), ClockError> {
    for (x, ck) in env {
        let mut c = ck;
        while let Clock::On(parent, y, _) = c {
            match env.get(y) {
                Some(cy) if cy == parent.as_ref() => {}
                Some(cy) => {
                    return Err(ClockError {
                        node: node.to_string(),
                        message: format!(
                            "{} is sampled on {} which is on {}, not {}",
                            x,
                            y,
                            show(cy),
                            show(parent)
                        ),
                    })
                }
                None => {
                    return Err(ClockError {
                        node: node.to_string(),
                        message: format!("clock of {} mentions undeclared {}", x, y),
                    })
                }
            }
            c = parent;
        }
    }
    Ok(())
}

/// Clocks of the flows of `e` under a complete clock environment.
pub fn clock_of_expr(prog: &Program, env: &ClockEnv, e: &Expr) -> Result<Vec<Clock>, ClockError> {
    let mut inf = Inference {
        prog,
        vars: env.iter().map(|(x, c)| (x.clone(), lift(c))).collect(),
        u: Unifier { node: "", bindings: Vec::new() },
    };
    let cs = inf.expr(e)?;
    Ok(cs.iter().map(|c| inf.u.ground(c)).collect())
}
