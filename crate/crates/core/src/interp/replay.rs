//! Checks that a history satisfies every equation of a node, using the
//! stream-level operators rather than the instant evaluator.

use thiserror::Error;

use super::{
    base_of, sem_clock, sem_const, sem_fby_l, sem_fby_nl, sem_ite, sem_lift1, sem_lift2, sem_merge, sem_when,
    History, Interpreter, RunError, Stream, Value,
};
use crate::ast::{infer_clocks, Body, ClockError, Equation, Expr, Ident, NEquation, Node, Program};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("node {node}: no stream for {var}")]
    Missing { node: Ident, var: Ident },
    #[error("node {node}: equation for {var} does not hold at instant {instant}")]
    Equation { node: Ident, var: Ident, instant: usize },
    #[error("node {node}: {var} is not present exactly on its clock at instant {instant}")]
    Clock { node: Ident, var: Ident, instant: usize },
    #[error("node {node}: {source}")]
    Run { node: Ident, source: RunError },
    #[error(transparent)]
    Inference(#[from] ClockError),
    #[error("unknown node {0}")]
    UnknownNode(Ident),
}

struct Replay<'a> {
    prog: &'a Program,
    interp: &'a Interpreter,
    node: &'a Node,
    h: &'a History,
    bs: &'a [bool],
}

impl<'a> Replay<'a> {
    fn run_err(&self, source: RunError) -> ReplayError {
        ReplayError::Run { node: self.node.name.clone(), source }
    }

    fn var(&self, x: &str) -> Result<&'a Stream, ReplayError> {
        self.h.get(x).ok_or_else(|| ReplayError::Missing { node: self.node.name.clone(), var: x.to_string() })
    }

    fn list(&self, es: &[Expr]) -> Result<Vec<Stream>, ReplayError> {
        let mut out = Vec::new();
        for e in es {
            out.extend(self.expr(e)?);
        }
        Ok(out)
    }

    fn single(&self, e: &Expr) -> Result<Stream, ReplayError> {
        let mut v = self.expr(e)?;
        match v.len() {
            1 => Ok(v.remove(0)),
            n => Err(self.run_err(RunError::Invalid {
                node: self.node.name.clone(),
                message: format!("expected one flow, found {}", n),
            })),
        }
    }

    fn expr(&self, e: &Expr) -> Result<Vec<Stream>, ReplayError> {
        let r = |x: Result<Stream, RunError>| x.map_err(|e| self.run_err(e));
        Ok(match e {
            Expr::Const(c) => vec![sem_const(self.bs, (*c).into())],
            Expr::Var(x) => vec![self.var(x)?.clone()],
            Expr::Unop(op, a) => vec![r(sem_lift1(*op, &self.single(a)?))?],
            Expr::Binop(op, a, b) => vec![r(sem_lift2(*op, &self.single(a)?, &self.single(b)?))?],
            Expr::When(es, x, k) => {
                let xs = self.var(x)?;
                self.list(es)?.iter().map(|s| r(sem_when(*k, xs, s))).collect::<Result<_, _>>()?
            }
            Expr::Merge(x, ts, fs) => {
                let xs = self.var(x)?;
                let (ts, fs) = (self.list(ts)?, self.list(fs)?);
                ts.iter().zip(&fs).map(|(t, f)| r(sem_merge(xs, t, f))).collect::<Result<_, _>>()?
            }
            Expr::Ite(c, ts, fs) => {
                let cs = self.single(c)?;
                let (ts, fs) = (self.list(ts)?, self.list(fs)?);
                ts.iter().zip(&fs).map(|(t, f)| r(sem_ite(&cs, t, f))).collect::<Result<_, _>>()?
            }
            Expr::Fby(e0s, es) => {
                let (xs, ys) = (self.list(e0s)?, self.list(es)?);
                xs.iter().zip(&ys).map(|(x, y)| r(sem_fby_l(x, y))).collect::<Result<_, _>>()?
            }
            Expr::Call(f, args) => {
                let args = self.list(args)?;
                let callee = self.prog.node(f).ok_or_else(|| ReplayError::UnknownNode(f.clone()))?;
                let bs = if args.is_empty() { self.bs.to_vec() } else { r_base(self, &args)? };
                let h = self.interp.run_on(f, &args, &bs).map_err(|e| self.run_err(e))?;
                check_node(self.prog, self.interp, callee, &h, &bs)?;
                callee.outputs.iter().map(|d| h[&d.name].clone()).collect()
            }
        })
    }

    fn compare(&self, lhs: &[Ident], got: &[Stream]) -> Result<(), ReplayError> {
        for (x, s) in lhs.iter().zip(got) {
            let want = self.var(x)?;
            if let Some(instant) = (0..self.bs.len()).find(|n| want.get(*n) != s.get(*n)) {
                return Err(ReplayError::Equation { node: self.node.name.clone(), var: x.clone(), instant });
            }
        }
        Ok(())
    }

    fn equation(&self, eq: &Equation) -> Result<(), ReplayError> {
        let got = self.list(&eq.rhs)?;
        self.compare(&eq.lhs, &got)
    }

    fn nequation(&self, eq: &NEquation) -> Result<(), ReplayError> {
        match eq {
            NEquation::Fby { var, init, next, .. } if init.as_constant().is_some() => {
                let c: Value = init.as_constant().expect("constant").into();
                let got = sem_fby_nl(c, &self.single(&next.to_lustre())?);
                self.compare(std::slice::from_ref(var), &[got])
            }
            eq => self.equation(&eq.to_lustre()),
        }
    }
}

fn r_base(r: &Replay<'_>, args: &[Stream]) -> Result<Vec<bool>, ReplayError> {
    base_of(args).map_err(|e| r.run_err(e))
}

fn check_node(
    prog: &Program,
    interp: &Interpreter,
    node: &Node,
    h: &History,
    bs: &[bool],
) -> Result<(), ReplayError> {
    let r = Replay { prog, interp, node, h, bs };
    match &node.body {
        Body::Lustre(eqs) => eqs.iter().try_for_each(|eq| r.equation(eq))?,
        Body::NLustre(eqs) => eqs.iter().try_for_each(|eq| r.nequation(eq))?,
    }
    let clocks = infer_clocks(prog, node)?;
    for (x, ck) in &clocks {
        let on = sem_clock(h, bs, ck).map_err(|e| r.run_err(e))?;
        let xs = r.var(x)?;
        if let Some(instant) = on.iter().zip(xs).position(|(b, v)| *b != v.is_present()) {
            return Err(ReplayError::Clock { node: node.name.clone(), var: x.clone(), instant });
        }
    }
    Ok(())
}

/// Checks that `h` satisfies every equation of node `f` and that each
/// variable is present exactly on its clock. The base clock is that of the
/// inputs, or always true for a node without inputs. Callees are run on
/// their argument streams and checked in turn.
pub fn check_history(p: &Program, f: &str, h: &History) -> Result<(), ReplayError> {
    let node = p.node(f).ok_or_else(|| ReplayError::UnknownNode(f.to_string()))?;
    let run_err = |source| ReplayError::Run { node: f.to_string(), source };
    let inputs: Vec<Stream> = node
        .inputs
        .iter()
        .map(|d| {
            h.get(&d.name).cloned().ok_or(ReplayError::Missing { node: f.to_string(), var: d.name.clone() })
        })
        .collect::<Result<_, _>>()?;
    let bs = if inputs.is_empty() {
        vec![true; h.values().map(Vec::len).max().unwrap_or(0)]
    } else {
        base_of(&inputs).map_err(run_err)?
    };
    let interp = Interpreter::new(p).map_err(run_err)?;
    check_node(p, &interp, node, h, &bs)
}
