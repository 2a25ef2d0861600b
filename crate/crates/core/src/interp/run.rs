//! Instant-by-instant evaluation of compiled nodes.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{
    apply_binop, apply_unop, base_of, ite_at, merge_at, respects_clock, when_at, History, RunError, Stream,
    Value, CV,
};
use crate::ast::{BinOp, Body, Dialect, Equation, Expr, Ident, NEquation, Node, Program, UnOp};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("instantaneous cycle in node {node}: {}", .cycle.join(" -> "))]
pub struct CausalityError {
    pub node: Ident,
    pub cycle: Vec<Ident>,
}

/// Variables defined and read at the current instant by each equation of
/// `n`, in body order.
fn dependencies(n: &Node) -> Vec<(Vec<Ident>, BTreeSet<Ident>)> {
    match &n.body {
        Body::Lustre(eqs) => eqs
            .iter()
            .map(|eq| {
                let mut deps = BTreeSet::new();
                eq.rhs.iter().for_each(|e| e.instant_fv(&mut deps));
                (eq.lhs.clone(), deps)
            })
            .collect(),
        Body::NLustre(eqs) => eqs
            .iter()
            .map(|eq| {
                let mut deps = BTreeSet::new();
                match eq {
                    NEquation::Fby { init, .. } => init.to_lustre().instant_fv(&mut deps),
                    eq => eq.to_lustre().rhs.iter().for_each(|e| e.instant_fv(&mut deps)),
                }
                (eq.defined().into_iter().cloned().collect(), deps)
            })
            .collect(),
    }
}

/// Equation indices in an order where every variable read at an instant is
/// defined before it is read. The delayed operand of `fby` is not a
/// dependency; a call depends on all of its arguments.
pub fn schedule(n: &Node) -> Result<Vec<usize>, CausalityError> {
    let deps = dependencies(n);
    let mut def_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, (lhs, _)) in deps.iter().enumerate() {
        for x in lhs {
            def_of.insert(x, i);
        }
    }
    let succ: Vec<Vec<usize>> = deps
        .iter()
        .map(|(_, d)| d.iter().filter_map(|x| def_of.get(x.as_str()).copied()).collect())
        .collect();
    let mut state = vec![0u8; deps.len()];
    let mut order = Vec::new();
    let mut stack = Vec::new();

    fn visit(
        i: usize,
        succ: &[Vec<usize>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
        order: &mut Vec<usize>,
    ) -> Result<(), Vec<usize>> {
        match state[i] {
            2 => return Ok(()),
            1 => {
                let from = stack.iter().position(|j| *j == i).unwrap_or(0);
                let mut cycle = stack[from..].to_vec();
                cycle.push(i);
                return Err(cycle);
            }
            _ => {}
        }
        state[i] = 1;
        stack.push(i);
        for &j in &succ[i] {
            visit(j, succ, state, stack, order)?;
        }
        stack.pop();
        state[i] = 2;
        order.push(i);
        Ok(())
    }

    for i in 0..deps.len() {
        visit(i, &succ, &mut state, &mut stack, &mut order).map_err(|cycle| CausalityError {
            node: n.name.clone(),
            cycle: cycle.iter().map(|j| deps[*j].0.join(",")).collect(),
        })?;
    }
    Ok(order)
}

/// Expressions with variables resolved to slots and every `fby` and call
/// given an index into the node's state.
#[derive(Clone, Debug)]
enum Ir {
    Const(Value),
    Var(usize),
    Unop(UnOp, Box<Ir>),
    Binop(BinOp, Box<Ir>, Box<Ir>),
    When(Vec<Ir>, usize, bool),
    Merge(usize, Vec<Ir>, Vec<Ir>),
    Ite(Box<Ir>, Vec<Ir>, Vec<Ir>),
    Fby(usize, Vec<Ir>),
    Call(usize, Vec<Ir>),
}

#[derive(Clone, Debug)]
struct Compiled {
    name: Ident,
    dialect: Dialect,
    names: Vec<Ident>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    /// In evaluation order.
    eqs: Vec<(Vec<usize>, Vec<Ir>)>,
    /// Delayed operands and initial register contents, per `fby`.
    fby_next: Vec<Vec<Ir>>,
    fby_init: Vec<Vec<Option<Value>>>,
    /// Callee index, per call.
    calls: Vec<usize>,
}

struct Compiler<'a> {
    index: &'a BTreeMap<Ident, usize>,
    slots: BTreeMap<Ident, usize>,
    node: &'a Node,
    fby_next: Vec<Vec<Ir>>,
    fby_init: Vec<Vec<Option<Value>>>,
    calls: Vec<usize>,
}

impl<'a> Compiler<'a> {
    fn invalid(&self, message: String) -> RunError {
        RunError::Invalid { node: self.node.name.clone(), message }
    }

    fn slot(&self, x: &str) -> Result<usize, RunError> {
        self.slots.get(x).copied().ok_or_else(|| self.invalid(format!("{} is not declared", x)))
    }

    fn list(&mut self, es: &[Expr]) -> Result<Vec<Ir>, RunError> {
        es.iter().map(|e| self.expr(e)).collect()
    }

    fn expr(&mut self, e: &Expr) -> Result<Ir, RunError> {
        Ok(match e {
            Expr::Const(c) => Ir::Const((*c).into()),
            Expr::Var(x) => Ir::Var(self.slot(x)?),
            Expr::Unop(op, a) => Ir::Unop(*op, Box::new(self.expr(a)?)),
            Expr::Binop(op, a, b) => Ir::Binop(*op, Box::new(self.expr(a)?), Box::new(self.expr(b)?)),
            Expr::When(es, x, k) => Ir::When(self.list(es)?, self.slot(x)?, *k),
            Expr::Merge(x, ts, fs) => Ir::Merge(self.slot(x)?, self.list(ts)?, self.list(fs)?),
            Expr::Ite(c, ts, fs) => Ir::Ite(Box::new(self.expr(c)?), self.list(ts)?, self.list(fs)?),
            Expr::Fby(e0s, es) => {
                let init = self.list(e0s)?;
                let next = self.list(es)?;
                self.fby(init, next, None)
            }
            Expr::Call(f, args) => {
                let callee = *self.index.get(f).ok_or_else(|| RunError::UnknownNode(f.clone()))?;
                let args = self.list(args)?;
                self.calls.push(callee);
                Ir::Call(self.calls.len() - 1, args)
            }
        })
    }

    fn fby(&mut self, init: Vec<Ir>, next: Vec<Ir>, register: Option<Value>) -> Ir {
        let id = self.fby_next.len();
        self.fby_init.push(register.into_iter().map(Some).collect());
        self.fby_next.push(next);
        Ir::Fby(id, init)
    }

    fn equation(&mut self, eq: &Equation) -> Result<(Vec<usize>, Vec<Ir>), RunError> {
        let lhs = eq.lhs.iter().map(|x| self.slot(x)).collect::<Result<_, _>>()?;
        Ok((lhs, self.list(&eq.rhs)?))
    }

    fn nequation(&mut self, eq: &NEquation) -> Result<(Vec<usize>, Vec<Ir>), RunError> {
        match eq {
            // fby with a constant head is a register holding the constant.
            NEquation::Fby { var, init, next, .. } if init.as_constant().is_some() => {
                let c = init.as_constant().map(Value::from);
                let presence = self.expr(&init.to_lustre())?;
                let next = self.expr(&next.to_lustre())?;
                Ok((vec![self.slot(var)?], vec![self.fby(vec![presence], vec![next], c)]))
            }
            eq => self.equation(&eq.to_lustre()),
        }
    }

    fn compile(mut self, order: &[usize]) -> Result<Compiled, RunError> {
        let n = self.node;
        let eqs = match &n.body {
            Body::Lustre(eqs) => {
                order.iter().map(|i| self.equation(&eqs[*i])).collect::<Result<Vec<_>, _>>()?
            }
            Body::NLustre(eqs) => {
                order.iter().map(|i| self.nequation(&eqs[*i])).collect::<Result<Vec<_>, _>>()?
            }
        };
        Ok(Compiled {
            name: n.name.clone(),
            dialect: n.body.dialect(),
            names: n.decls().map(|d| d.name.clone()).collect(),
            inputs: (0..n.inputs.len()).collect(),
            outputs: (n.inputs.len()..n.inputs.len() + n.outputs.len()).collect(),
            eqs,
            fby_next: self.fby_next,
            fby_init: self.fby_init,
            calls: self.calls,
        })
    }
}

/// Mutable state of one node instance: `fby` registers and callee
/// instances.
#[derive(Clone, Debug)]
struct Instance {
    fby: Vec<Vec<Option<Value>>>,
    calls: Vec<Instance>,
}

impl Instance {
    fn new(nodes: &[Compiled], i: usize) -> Instance {
        let c = &nodes[i];
        Instance {
            fby: c.fby_init.clone(),
            calls: c.calls.iter().map(|&j| Instance::new(nodes, j)).collect(),
        }
    }
}

/// A program compiled for repeated execution.
#[derive(Clone, Debug)]
pub struct Interpreter {
    nodes: Vec<Compiled>,
    index: BTreeMap<Ident, usize>,
}

struct Frame<'a> {
    nodes: &'a [Compiled],
    node: &'a Compiled,
    vals: Vec<CV>,
    base: bool,
    instant: usize,
    /// Presence of each `fby` output at this instant, once evaluated.
    fby_present: Vec<Option<Vec<bool>>>,
    pending: Vec<usize>,
}

impl<'a> Frame<'a> {
    fn list(&mut self, inst: &mut Instance, es: &[Ir]) -> Result<Vec<CV>, RunError> {
        let mut out = Vec::new();
        for e in es {
            out.extend(self.eval(inst, e)?);
        }
        Ok(out)
    }

    fn single(&mut self, inst: &mut Instance, e: &Ir) -> Result<CV, RunError> {
        let v = self.eval(inst, e)?;
        match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(RunError::Invalid { node: self.node.name.clone(), message: "expected one flow".into() }),
        }
    }

    fn mismatch(&self, context: &str) -> RunError {
        RunError::ClockMismatch {
            instant: self.instant,
            context: format!("{} in node {}", context, self.node.name),
        }
    }

    fn eval(&mut self, inst: &mut Instance, e: &Ir) -> Result<Vec<CV>, RunError> {
        let n = self.instant;
        Ok(match e {
            Ir::Const(c) => vec![if self.base { CV::Present(*c) } else { CV::Absent }],
            Ir::Var(s) => vec![self.vals[*s]],
            Ir::Unop(op, a) => vec![match self.single(inst, a)? {
                CV::Present(v) => CV::Present(apply_unop(*op, v, n)?),
                CV::Absent => CV::Absent,
            }],
            Ir::Binop(op, a, b) => {
                let (a, b) = (self.single(inst, a)?, self.single(inst, b)?);
                vec![match (a, b) {
                    (CV::Present(x), CV::Present(y)) => CV::Present(apply_binop(*op, x, y, n)?),
                    (CV::Absent, CV::Absent) => CV::Absent,
                    _ => return Err(self.mismatch(op.symbol())),
                }]
            }
            Ir::When(es, x, k) => {
                let xv = self.vals[*x];
                let vs = self.list(inst, es)?;
                vs.into_iter().map(|v| when_at(*k, xv, v, n)).collect::<Result<_, _>>()?
            }
            Ir::Merge(x, ts, fs) => {
                let xv = self.vals[*x];
                let (ts, fs) = (self.list(inst, ts)?, self.list(inst, fs)?);
                ts.into_iter().zip(fs).map(|(t, f)| merge_at(xv, t, f, n)).collect::<Result<_, _>>()?
            }
            Ir::Ite(c, ts, fs) => {
                let cv = self.single(inst, c)?;
                let (ts, fs) = (self.list(inst, ts)?, self.list(inst, fs)?);
                ts.into_iter().zip(fs).map(|(t, f)| ite_at(cv, t, f, n)).collect::<Result<_, _>>()?
            }
            Ir::Fby(id, init) => {
                let init = self.list(inst, init)?;
                let regs = &mut inst.fby[*id];
                if regs.len() < init.len() {
                    regs.resize(init.len(), None);
                }
                let out: Vec<CV> = init
                    .iter()
                    .zip(regs)
                    .map(|(v, r)| match v {
                        CV::Present(x) => CV::Present(r.unwrap_or(*x)),
                        CV::Absent => CV::Absent,
                    })
                    .collect();
                self.fby_present[*id] = Some(init.iter().map(|v| v.is_present()).collect());
                self.pending.push(*id);
                out
            }
            Ir::Call(id, args) => {
                let args = self.list(inst, args)?;
                let base = match args.first() {
                    None => self.base,
                    Some(a) => {
                        if args.iter().any(|b| b.is_present() != a.is_present()) {
                            return Err(self.mismatch("arguments of a call"));
                        }
                        a.is_present()
                    }
                };
                let callee = &self.nodes[self.node.calls[*id]];
                let vals = step(self.nodes, callee, &mut inst.calls[*id], &args, base, n)?;
                callee.outputs.iter().map(|s| vals[*s]).collect()
            }
        })
    }

    /// Loads the delayed operands of every `fby` evaluated this instant.
    fn update_registers(&mut self, inst: &mut Instance) -> Result<(), RunError> {
        let mut i = 0;
        while i < self.pending.len() {
            let id = self.pending[i];
            i += 1;
            let next = self.list(inst, &self.node.fby_next[id])?;
            let present = self.fby_present[id].take().unwrap_or_default();
            for (k, v) in next.iter().enumerate() {
                match (present.get(k), v) {
                    (Some(true), CV::Present(x)) => inst.fby[id][k] = Some(*x),
                    (Some(false), CV::Absent) => {}
                    _ => return Err(self.mismatch("operands of fby")),
                }
            }
        }
        Ok(())
    }
}

/// One instant of a node: the value of every variable, in declaration
/// order.
fn step(
    nodes: &[Compiled],
    node: &Compiled,
    inst: &mut Instance,
    inputs: &[CV],
    base: bool,
    instant: usize,
) -> Result<Vec<CV>, RunError> {
    let mut frame = Frame {
        nodes,
        node,
        vals: vec![CV::Absent; node.names.len()],
        base,
        instant,
        fby_present: vec![None; node.fby_next.len()],
        pending: Vec::new(),
    };
    for (s, v) in node.inputs.iter().zip(inputs) {
        if v.is_present() != base {
            return Err(frame.mismatch("input not on the base clock"));
        }
        frame.vals[*s] = *v;
    }
    for (lhs, rhs) in &node.eqs {
        let vs = frame.list(inst, rhs)?;
        for (s, v) in lhs.iter().zip(vs) {
            frame.vals[*s] = v;
        }
    }
    frame.update_registers(inst)?;
    Ok(frame.vals)
}

impl Interpreter {
    pub fn new(p: &Program) -> Result<Interpreter, RunError> {
        let order = p.topological_order().map_err(|cycle| RunError::Invalid {
            node: cycle.first().cloned().unwrap_or_default(),
            message: format!("recursive call cycle: {}", cycle.join(" -> ")),
        })?;
        let mut nodes = Vec::new();
        let mut index = BTreeMap::new();
        for n in order {
            let sched = schedule(n)?;
            let compiler = Compiler {
                index: &index,
                slots: n.decls().enumerate().map(|(i, d)| (d.name.clone(), i)).collect(),
                node: n,
                fby_next: Vec::new(),
                fby_init: Vec::new(),
                calls: Vec::new(),
            };
            let c = compiler.compile(&sched)?;
            index.insert(n.name.clone(), nodes.len());
            nodes.push(c);
        }
        Ok(Interpreter { nodes, index })
    }

    /// Runs node `f` for `horizon` instants on the base clock of its
    /// inputs (always true for a node without inputs).
    pub fn run(&self, f: &str, inputs: &[Stream], horizon: usize) -> Result<History, RunError> {
        if inputs.iter().any(|s| s.len() < horizon) {
            return Err(RunError::ShortInput { node: f.to_string(), horizon });
        }
        let inputs: Vec<Stream> = inputs.iter().map(|s| s[..horizon].to_vec()).collect();
        let bs = if inputs.is_empty() { vec![true; horizon] } else { base_of(&inputs)? };
        self.run_on(f, &inputs, &bs)
    }

    /// Runs node `f` on the base clock `bs`, one instant per element.
    pub fn run_on(&self, f: &str, inputs: &[Stream], bs: &[bool]) -> Result<History, RunError> {
        let i = *self.index.get(f).ok_or_else(|| RunError::UnknownNode(f.to_string()))?;
        let node = &self.nodes[i];
        let horizon = bs.len();
        if inputs.len() != node.inputs.len() {
            return Err(RunError::Arity {
                node: f.to_string(),
                expected: node.inputs.len(),
                found: inputs.len(),
            });
        }
        if inputs.iter().any(|s| s.len() < horizon) {
            return Err(RunError::ShortInput { node: f.to_string(), horizon });
        }
        let mut inst = Instance::new(&self.nodes, i);
        let mut columns: Vec<Stream> = vec![Vec::with_capacity(horizon); node.names.len()];
        for (n, b) in bs.iter().enumerate() {
            let ins: Vec<CV> = inputs.iter().map(|s| s[n]).collect();
            let vals = step(&self.nodes, node, &mut inst, &ins, *b, n)?;
            for (col, v) in columns.iter_mut().zip(vals) {
                col.push(v);
            }
        }
        let h: History = node.names.iter().cloned().zip(columns).collect();
        if node.dialect == Dialect::NLustre && !respects_clock(&h, bs) {
            return Err(RunError::Invalid {
                node: f.to_string(),
                message: "history does not respect the base clock".into(),
            });
        }
        Ok(h)
    }
}

/// Runs node `f` of `p` on `inputs` for `horizon` instants and returns the
/// streams of all its variables.
pub fn run_node(p: &Program, f: &str, inputs: &[Stream], horizon: usize) -> Result<History, RunError> {
    Interpreter::new(p)?.run(f, inputs, horizon)
}
