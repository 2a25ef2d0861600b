//! Random well-formed, well-clocked, causal Lustre programs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ast::{
    validate, BinOp, Body, Clock, Decl, Equation, Expr, Ident, Literal, Node, Program, Span, UnOp, ValueType,
};
use crate::interp::schedule;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_nodes: usize,
    pub max_equations: usize,
    pub max_depth: usize,
    /// Probability that a generated variable is an `int`.
    pub int_ratio: f64,
    pub max_clock_depth: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_nodes: 5,
            max_equations: 8,
            max_depth: 3,
            int_ratio: 0.5,
            max_clock_depth: 2,
            max_inputs: 3,
            max_outputs: 2,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> GenConfig {
        GenConfig { seed, ..GenConfig::default() }
    }
}

#[derive(Clone, Debug)]
struct Var {
    name: Ident,
    ty: ValueType,
    ck: Clock,
    /// Position of the defining equation; inputs come before everything.
    pos: Option<usize>,
}

struct Callee {
    name: Ident,
    inputs: Vec<ValueType>,
    outputs: Vec<ValueType>,
}

enum Plan {
    Single(usize),
    Tuple(Vec<usize>, usize),
}

struct NodeGen<'a> {
    cfg: &'a GenConfig,
    rng: &'a mut ChaCha8Rng,
    callees: &'a [Callee],
    vars: Vec<Var>,
    /// Position of the equation being generated.
    pos: usize,
}

impl<'a> NodeGen<'a> {
    fn value_type(&mut self) -> ValueType {
        if self.rng.gen_bool(self.cfg.int_ratio) {
            ValueType::Int
        } else {
            ValueType::Bool
        }
    }

    fn literal(&mut self, ty: ValueType) -> Literal {
        match ty {
            ValueType::Int => Literal::Int(self.rng.gen_range(-5..=5)),
            ValueType::Bool => Literal::Bool(self.rng.gen()),
        }
    }

    fn sampled(c: Literal, ck: &Clock) -> Expr {
        ck.samplings().into_iter().fold(Expr::Const(c), |e, (x, k)| Expr::When(vec![e], x.clone(), k))
    }

    fn visible(&self, v: &Var, delayed: bool) -> bool {
        delayed || v.pos.is_none_or(|p| p < self.pos)
    }

    fn candidates(&self, ty: ValueType, ck: &Clock, delayed: bool) -> Vec<Ident> {
        self.vars
            .iter()
            .filter(|v| v.ty == ty && &v.ck == ck && self.visible(v, delayed))
            .map(|v| v.name.clone())
            .collect()
    }

    fn leaf(&mut self, ty: ValueType, ck: &Clock, delayed: bool) -> Expr {
        let vs = self.candidates(ty, ck, delayed);
        if !vs.is_empty() && self.rng.gen_bool(0.75) {
            return Expr::Var(vs.choose(self.rng).expect("non-empty").clone());
        }
        let c = self.literal(ty);
        Self::sampled(c, ck)
    }

    fn expr(&mut self, ty: ValueType, ck: &Clock, depth: usize, delayed: bool) -> Expr {
        if depth == 0 {
            return self.leaf(ty, ck, delayed);
        }
        let d = depth - 1;
        let scrutinees = self.candidates(ValueType::Bool, ck, delayed);
        let calls: Vec<usize> =
            (0..self.callees.len()).filter(|i| self.callees[*i].outputs == [ty]).collect();
        let sub = matches!(ck, Clock::On(..));
        let weights = [
            3,
            4,
            if sub { 2 } else { 0 },
            if scrutinees.is_empty() { 0 } else { 1 },
            1,
            2,
            if calls.is_empty() { 0 } else { 1 },
        ];
        let total: u32 = weights.iter().sum();
        let mut pick = self.rng.gen_range(0..total);
        let choice = weights.iter().position(|w| {
            if pick < *w {
                true
            } else {
                pick -= w;
                false
            }
        });
        match choice.unwrap_or(0) {
            0 => self.leaf(ty, ck, delayed),
            1 => self.operator(ty, ck, d, delayed),
            2 => {
                let Clock::On(parent, x, k) = ck else { unreachable!() };
                Expr::When(vec![self.expr(ty, parent, d, delayed)], x.clone(), *k)
            }
            3 => {
                let x = scrutinees.choose(self.rng).expect("non-empty").clone();
                let t = self.expr(ty, &ck.clone().on(x.clone(), true), d, delayed);
                let f = self.expr(ty, &ck.clone().on(x.clone(), false), d, delayed);
                Expr::Merge(x, vec![t], vec![f])
            }
            4 => {
                let c = self.expr(ValueType::Bool, ck, d, delayed);
                let t = self.expr(ty, ck, d, delayed);
                let f = self.expr(ty, ck, d, delayed);
                Expr::Ite(Box::new(c), vec![t], vec![f])
            }
            5 => {
                let init = self.expr(ty, ck, d, delayed);
                let next = self.expr(ty, ck, d, true);
                Expr::Fby(vec![init], vec![next])
            }
            _ => {
                let i = *calls.choose(self.rng).expect("non-empty");
                self.call(i, ck, d, delayed)
            }
        }
    }

    fn call(&mut self, i: usize, ck: &Clock, depth: usize, delayed: bool) -> Expr {
        let inputs = self.callees[i].inputs.clone();
        let args = inputs.iter().map(|ty| self.expr(*ty, ck, depth, delayed)).collect();
        Expr::Call(self.callees[i].name.clone(), args)
    }

    fn operator(&mut self, ty: ValueType, ck: &Clock, d: usize, delayed: bool) -> Expr {
        use BinOp::*;
        if self.rng.gen_bool(0.2) {
            let op = if ty == ValueType::Int { UnOp::Neg } else { UnOp::Not };
            return Expr::unop(op, self.expr(ty, ck, d, delayed));
        }
        match ty {
            ValueType::Int => {
                let op = *[Add, Sub, Mul, Add, Sub, Div, Mod].choose(self.rng).expect("non-empty");
                let a = self.expr(ty, ck, d, delayed);
                let b = if matches!(op, Div | Mod) {
                    // Non-zero constant divisors keep runs free of arithmetic errors.
                    let k = *[-3, -2, 2, 3, 5].choose(self.rng).expect("non-empty");
                    Self::sampled(Literal::Int(k), ck)
                } else {
                    self.expr(ty, ck, d, delayed)
                };
                Expr::binop(op, a, b)
            }
            ValueType::Bool => {
                let op = *[And, Or, Eq, Ne, Lt, Le, Gt, Ge].choose(self.rng).expect("non-empty");
                let operand = match op {
                    And | Or => ValueType::Bool,
                    Eq | Ne => self.value_type(),
                    _ => ValueType::Int,
                };
                let a = self.expr(operand, ck, d, delayed);
                let b = self.expr(operand, ck, d, delayed);
                Expr::binop(op, a, b)
            }
        }
    }

    /// A clock built from boolean variables defined before position `pos`.
    fn clock(&mut self, pos: usize) -> Clock {
        let mut ck = Clock::Base;
        while ck.depth() < self.cfg.max_clock_depth && self.rng.gen_bool(0.4) {
            let drivers: Vec<Ident> = self
                .vars
                .iter()
                .filter(|v| v.ty == ValueType::Bool && v.ck == ck && v.pos.is_none_or(|p| p < pos))
                .map(|v| v.name.clone())
                .collect();
            let Some(x) = drivers.choose(self.rng).cloned() else { break };
            let k = self.rng.gen_bool(0.6);
            ck = ck.on(x, k);
        }
        ck
    }
}

fn gen_node(cfg: &GenConfig, rng: &mut ChaCha8Rng, name: Ident, callees: &[Callee]) -> Node {
    let mut g = NodeGen { cfg, rng, callees, vars: Vec::new(), pos: 0 };
    let n_in = g.rng.gen_range(1..=cfg.max_inputs.max(1));
    for i in 0..n_in {
        let ty = g.value_type();
        g.vars.push(Var { name: format!("i{}", i + 1), ty, ck: Clock::Base, pos: None });
    }
    let n_eq = g.rng.gen_range(1..=cfg.max_equations.max(1));
    let n_out = g.rng.gen_range(1..=cfg.max_outputs.max(1).min(n_eq));
    let mut out_pos: Vec<usize> = (0..n_eq).collect();
    out_pos.shuffle(g.rng);
    out_pos.truncate(n_out);
    out_pos.sort();

    let multi: Vec<usize> = (0..callees.len()).filter(|i| callees[*i].outputs.len() > 1).collect();
    let (mut outputs, mut locals) = (Vec::new(), Vec::new());
    let mut plans = Vec::new();
    for pos in 0..n_eq {
        if out_pos.contains(&pos) {
            let ty = g.value_type();
            let name = format!("o{}", outputs.len() + 1);
            g.vars.push(Var { name: name.clone(), ty, ck: Clock::Base, pos: Some(pos) });
            outputs.push(g.vars.len() - 1);
            plans.push(Plan::Single(g.vars.len() - 1));
            continue;
        }
        let ck = g.clock(pos);
        if !multi.is_empty() && g.rng.gen_bool(0.15) {
            let c = *multi.choose(g.rng).expect("non-empty");
            let mut group = Vec::new();
            for ty in callees[c].outputs.clone() {
                let name = format!("l{}", locals.len() + 1);
                g.vars.push(Var { name, ty, ck: ck.clone(), pos: Some(pos) });
                locals.push(g.vars.len() - 1);
                group.push(g.vars.len() - 1);
            }
            plans.push(Plan::Tuple(group, c));
        } else {
            let ty = g.value_type();
            let name = format!("l{}", locals.len() + 1);
            g.vars.push(Var { name, ty, ck, pos: Some(pos) });
            locals.push(g.vars.len() - 1);
            plans.push(Plan::Single(g.vars.len() - 1));
        }
    }

    let mut eqs = Vec::new();
    for (pos, plan) in plans.iter().enumerate() {
        g.pos = pos;
        let eq = match plan {
            Plan::Single(v) => {
                let (ty, ck) = (g.vars[*v].ty, g.vars[*v].ck.clone());
                let rhs = g.expr(ty, &ck, cfg.max_depth, false);
                Equation::new(vec![g.vars[*v].name.clone()], vec![rhs])
            }
            Plan::Tuple(vs, c) => {
                let ck = g.vars[vs[0]].ck.clone();
                let rhs = g.call(*c, &ck, cfg.max_depth.saturating_sub(1), false);
                Equation::new(vs.iter().map(|v| g.vars[*v].name.clone()).collect(), vec![rhs])
            }
        };
        eqs.push(eq);
    }

    let decl = |v: &Var| {
        let d = Decl::new(v.name.clone(), v.ty);
        match &v.ck {
            Clock::Base => d,
            ck => d.with_clock(ck.clone()),
        }
    };
    Node {
        name,
        inputs: g.vars.iter().filter(|v| v.pos.is_none()).map(decl).collect(),
        outputs: outputs.iter().map(|i| decl(&g.vars[*i])).collect(),
        locals: locals.iter().map(|i| decl(&g.vars[*i])).collect(),
        body: Body::Lustre(eqs),
        span: Span::default(),
    }
}

fn attempt(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Program {
    let n_nodes = rng.gen_range(1..=cfg.max_nodes.max(1));
    let mut nodes: Vec<Node> = Vec::new();
    let mut callees = Vec::new();
    for i in 0..n_nodes {
        let n = gen_node(cfg, rng, format!("n{}", i), &callees);
        callees.push(Callee {
            name: n.name.clone(),
            inputs: n.inputs.iter().map(|d| d.ty).collect(),
            outputs: n.outputs.iter().map(|d| d.ty).collect(),
        });
        nodes.push(n);
    }
    Program::new(nodes)
}

/// A random program accepted by `validate` and `schedule`. Callees always
/// precede their callers, and every instantaneous reference points to an
/// earlier equation, so cycles only pass through `fby`.
pub fn generate_program(cfg: &GenConfig) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    loop {
        let p = attempt(cfg, &mut rng);
        if validate(&p).is_empty() && p.nodes.iter().all(|n| schedule(n).is_ok()) {
            return p;
        }
    }
}

/// Nodes not called by any other node.
pub fn roots(p: &Program) -> Vec<&Node> {
    let called: std::collections::BTreeSet<Ident> = p.nodes.iter().flat_map(|n| n.callees()).collect();
    p.nodes.iter().filter(|n| !called.contains(&n.name)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_programs_are_well_formed() {
        for seed in 0..200 {
            let cfg = GenConfig::with_seed(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = attempt(&cfg, &mut rng);
            assert_eq!(validate(&p), vec![], "seed {}", seed);
            for n in &p.nodes {
                assert!(schedule(n).is_ok(), "seed {}", seed);
            }
        }
    }

    #[test]
    fn smallest_configuration() {
        let cfg = GenConfig { max_nodes: 1, max_equations: 1, ..GenConfig::with_seed(1) };
        let p = generate_program(&cfg);
        assert_eq!(p.nodes.len(), 1);
        assert_eq!(p.nodes[0].body.len(), 1);
    }

    #[test]
    fn seeded() {
        assert_eq!(generate_program(&GenConfig::with_seed(7)), generate_program(&GenConfig::with_seed(7)));
    }
}
