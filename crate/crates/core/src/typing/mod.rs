//! Security typing of clocks, expressions, equations and nodes, and the
//! elimination of local type variables that produces node signatures.

mod policy;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ast::{
    clock_of_expr, infer_clocks, Clock, ClockEnv, ClockError, Equation, Expr, Ident, Node, Program,
};
use crate::sectype::{
    flatten_constraints, strip_refinements, Constraint, ConstraintSet, SecType, Subst, TVar, VarClass,
};

pub use policy::{check_policy, minimal_instantiation, Policy, PolicyError, PolicyVerdict};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("{0} has no security type")]
    Unbound(Ident),
    #[error("call to unknown node {0}")]
    UnknownNode(Ident),
    #[error("node {node} expects {expected} arguments, got {found}")]
    CallArity { node: Ident, expected: usize, found: usize },
    #[error("equation for {lhs} defines {defined} variables from {flows} flows")]
    EquationArity { lhs: String, defined: usize, flows: usize },
    #[error("cannot eliminate {var}: {count} constraints have it on the right")]
    NotUniquelyDefined { var: TVar, count: usize },
    #[error("cannot eliminate {var}: it occurs in {constraint}")]
    Occurs { var: TVar, constraint: Constraint },
    #[error("recursive call cycle: {}", .0.join(" -> "))]
    Recursive(Vec<Ident>),
    #[error(transparent)]
    Clock(#[from] ClockError),
}

/// Security types of program variables and of the base clock.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeEnv {
    pub vars: BTreeMap<Ident, SecType>,
    pub base: SecType,
}

impl TypeEnv {
    pub fn new(base: SecType) -> TypeEnv {
        TypeEnv { vars: BTreeMap::new(), base }
    }

    pub fn get(&self, x: &str) -> Result<&SecType, TypeError> {
        self.vars.get(x).ok_or_else(|| TypeError::Unbound(x.to_string()))
    }

    pub fn insert(&mut self, x: impl Into<Ident>, t: SecType) {
        self.vars.insert(x.into(), t);
    }
}

/// `f(ᾱ) ⇒γ β̄ {ρ}`, with the interface names the variables stand for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeSignature {
    pub name: Ident,
    pub inputs: Vec<TVar>,
    pub outputs: Vec<TVar>,
    pub clock: TVar,
    pub rho: ConstraintSet,
    pub input_names: Vec<Ident>,
    pub output_names: Vec<Ident>,
}

pub type SignatureEnv = BTreeMap<Ident, NodeSignature>;

impl NodeSignature {
    /// Printable name of a signature variable: `g`, `a1..an`, and `b` for a
    /// single output or `b1..bm` otherwise.
    pub fn var_name(&self, v: &TVar) -> String {
        match v.class {
            VarClass::Output if self.outputs.len() == 1 => "b".into(),
            _ => v.to_string(),
        }
    }

    /// `f(a1,a2) =>g (b) { g|a1|a2 <= b }`
    pub fn render(&self) -> String {
        let name = |v: &TVar| self.var_name(v);
        let ins: Vec<String> = self.inputs.iter().map(name).collect();
        let outs: Vec<String> = self.outputs.iter().map(name).collect();
        let mut cs: Vec<&Constraint> = self.rho.iter().collect();
        cs.sort_by(|x, y| (&x.rhs, &x.lhs).cmp(&(&y.rhs, &y.lhs)));
        let body: Vec<String> = cs.iter().map(|c| c.render(&name, "|")).collect();
        let body = if body.is_empty() { "{}".to_string() } else { format!("{{ {} }}", body.join(", ")) };
        format!("{}({}) =>{} ({}) {}", self.name, ins.join(","), name(&self.clock), outs.join(","), body)
    }

    pub fn interface_vars(&self) -> BTreeSet<TVar> {
        self.inputs.iter().chain(&self.outputs).copied().chain([self.clock]).collect()
    }

    /// The signature variable standing for an interface name, with `base`
    /// naming the clock.
    pub fn role(&self, name: &str) -> Option<TVar> {
        if name == "base" {
            return Some(self.clock);
        }
        let pos = |names: &[Ident]| names.iter().position(|x| x == name);
        pos(&self.input_names)
            .map(|i| self.inputs[i])
            .or_else(|| pos(&self.output_names).map(|i| self.outputs[i]))
    }
}

impl fmt::Display for NodeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Security type of a clock.
pub fn type_clock(env: &TypeEnv, ck: &Clock) -> Result<SecType, TypeError> {
    match ck {
        Clock::Base => Ok(env.base.clone()),
        Clock::On(parent, x, _) => Ok(SecType::join(type_clock(env, parent)?, env.get(x)?.clone())),
    }
}

/// Types expressions and equations of one node. Each node call receives
/// fresh variables for its outputs, which are recorded in creation order.
pub struct Typer<'a> {
    prog: &'a Program,
    sigs: &'a SignatureEnv,
    clocks: &'a ClockEnv,
    call_vars: Vec<TVar>,
}

impl<'a> Typer<'a> {
    pub fn new(prog: &'a Program, sigs: &'a SignatureEnv, clocks: &'a ClockEnv) -> Typer<'a> {
        Typer { prog, sigs, clocks, call_vars: Vec::new() }
    }

    pub fn call_vars(&self) -> &[TVar] {
        &self.call_vars
    }

    fn fresh_call_var(&mut self) -> TVar {
        let v = TVar::new(VarClass::Call, self.call_vars.len() as u32 + 1);
        self.call_vars.push(v);
        v
    }

    fn list(&mut self, env: &TypeEnv, es: &[Expr]) -> Result<Vec<SecType>, TypeError> {
        let mut out = Vec::new();
        for e in es {
            out.extend(self.type_expr(env, e)?);
        }
        Ok(out)
    }

    fn single(&mut self, env: &TypeEnv, e: &Expr) -> Result<SecType, TypeError> {
        let ts = self.type_expr(env, e)?;
        Ok(SecType::join_all(ts))
    }

    /// One type per flow of `e`.
    pub fn type_expr(&mut self, env: &TypeEnv, e: &Expr) -> Result<Vec<SecType>, TypeError> {
        match e {
            Expr::Const(_) => Ok(vec![SecType::Bot]),
            Expr::Var(x) => Ok(vec![env.get(x)?.clone()]),
            Expr::Unop(_, e) => self.type_expr(env, e),
            Expr::Binop(_, a, b) => Ok(vec![SecType::join(self.single(env, a)?, self.single(env, b)?)]),
            Expr::When(es, x, _) => {
                let tx = env.get(x)?.clone();
                Ok(self.list(env, es)?.into_iter().map(|t| SecType::join(t, tx.clone())).collect())
            }
            Expr::Merge(x, ts, fs) => {
                let theta = env.get(x)?.clone();
                self.branches(env, theta, ts, fs)
            }
            Expr::Ite(c, ts, fs) => {
                let theta = self.single(env, c)?;
                self.branches(env, theta, ts, fs)
            }
            Expr::Fby(e0s, es) => {
                let a = self.list(env, e0s)?;
                let b = self.list(env, es)?;
                if a.len() != b.len() {
                    return Err(TypeError::EquationArity {
                        lhs: "fby".into(),
                        defined: a.len(),
                        flows: b.len(),
                    });
                }
                Ok(a.into_iter().zip(b).map(|(a, b)| SecType::join(a, b)).collect())
            }
            Expr::Call(f, args) => self.call(env, f, args, e),
        }
    }

    fn branches(
        &mut self,
        env: &TypeEnv,
        theta: SecType,
        ts: &[Expr],
        fs: &[Expr],
    ) -> Result<Vec<SecType>, TypeError> {
        let a = self.list(env, ts)?;
        let b = self.list(env, fs)?;
        if a.len() != b.len() {
            return Err(TypeError::EquationArity {
                lhs: "branches".into(),
                defined: a.len(),
                flows: b.len(),
            });
        }
        Ok(a.into_iter().zip(b).map(|(a, b)| SecType::join_all([theta.clone(), a, b])).collect())
    }

    /// `f(ē)` has type `β̄{|ρ′|}` where `ρ′` instantiates the callee's
    /// constraints with the argument types, the type of the call's clock and
    /// fresh variables for the callee's outputs.
    fn call(
        &mut self,
        env: &TypeEnv,
        f: &str,
        args: &[Expr],
        whole: &Expr,
    ) -> Result<Vec<SecType>, TypeError> {
        let sig = self.sigs.get(f).ok_or_else(|| TypeError::UnknownNode(f.to_string()))?;
        let arg_types = self.list(env, args)?;
        if arg_types.len() != sig.inputs.len() {
            return Err(TypeError::CallArity {
                node: f.to_string(),
                expected: sig.inputs.len(),
                found: arg_types.len(),
            });
        }
        let ck = clock_of_expr(self.prog, self.clocks, whole)?.into_iter().next().unwrap_or(Clock::Base);
        let gamma = type_clock(env, &ck)?;
        let mut s: Subst = BTreeMap::new();
        s.insert(sig.clock, gamma);
        // Constraints carried by the arguments stay with the call even when
        // the callee's constraints never mention that input.
        let mut carried = ConstraintSet::new();
        for (a, t) in sig.inputs.iter().zip(arg_types) {
            let (t, rho) = strip_refinements(&t);
            carried = carried.union(&rho);
            s.insert(*a, t);
        }
        let (outputs, rho) = (sig.outputs.clone(), sig.rho.clone());
        let fresh: Vec<TVar> = outputs.iter().map(|_| self.fresh_call_var()).collect();
        for (b, c) in outputs.iter().zip(&fresh) {
            s.insert(*b, SecType::Var(*c));
        }
        let rho2 = rho.substitute(&s).union(&carried);
        Ok(fresh.into_iter().map(|c| SecType::refine(SecType::Var(c), rho2.clone())).collect())
    }

    /// `{γck ⊔ αi ⊑ env(xi)}`, flattened.
    pub fn type_equation(&mut self, env: &TypeEnv, eq: &Equation) -> Result<ConstraintSet, TypeError> {
        let alphas = self.list(env, &eq.rhs)?;
        if alphas.len() != eq.lhs.len() {
            return Err(TypeError::EquationArity {
                lhs: eq.lhs.join(", "),
                defined: eq.lhs.len(),
                flows: alphas.len(),
            });
        }
        let ck = match (&eq.clock, eq.lhs.first()) {
            (Some(ck), _) => ck.clone(),
            (None, Some(x)) => self.clocks.get(x).cloned().unwrap_or(Clock::Base),
            (None, None) => Clock::Base,
        };
        let gamma = type_clock(env, &ck)?;
        let mut out = BTreeSet::new();
        for (x, a) in eq.lhs.iter().zip(alphas) {
            out.insert(Constraint::new(SecType::join(gamma.clone(), a), env.get(x)?.clone()));
        }
        Ok(flatten_constraints(&ConstraintSet(out)))
    }
}

/// Result of eliminating type variables from a constraint set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplified {
    pub types: Vec<SecType>,
    pub rho: ConstraintSet,
    /// `(δ, ν)` per eliminated variable, in elimination order; `ν` may
    /// mention variables eliminated later.
    pub eliminated: Vec<(TVar, SecType)>,
}

impl Simplified {
    /// The type each eliminated variable stands for, in terms of the
    /// surviving variables only.
    pub fn resolved(&self) -> BTreeMap<TVar, SecType> {
        let mut out: Subst = BTreeMap::new();
        for (d, nu) in self.eliminated.iter().rev() {
            let t = nu.substitute(&out);
            out.insert(*d, t);
        }
        out
    }
}

/// Eliminates each `δ` in order by substituting the left-hand side of its
/// unique defining constraint `ν ⊑ δ` (or `ν ⊔ δ ⊑ δ`) everywhere.
pub fn simplify(types: &[SecType], rho: &ConstraintSet, deltas: &[TVar]) -> Result<Simplified, TypeError> {
    let mut types = types.to_vec();
    let mut rho = rho.clone();
    let mut eliminated = Vec::new();
    for d in deltas {
        let target = SecType::Var(*d);
        let defining: Vec<&Constraint> = rho.iter().filter(|c| c.rhs == target).collect();
        if defining.len() != 1 {
            return Err(TypeError::NotUniquelyDefined { var: *d, count: defining.len() });
        }
        let c = defining[0].clone();
        // Removing δ from the left covers the `ν ⊔ δ ⊑ δ` shape.
        let nu = match &c.lhs {
            SecType::Join(ts) => SecType::join_all(ts.iter().filter(|t| **t != target).cloned()),
            t if *t == target => SecType::Bot,
            t => t.clone(),
        };
        if nu.vars().contains(d) {
            return Err(TypeError::Occurs { var: *d, constraint: c });
        }
        let s: Subst = [(*d, nu.clone())].into();
        let rest = ConstraintSet(rho.0.iter().filter(|x| **x != c).cloned().collect());
        rho = rest.substitute(&s);
        types = types.iter().map(|t| t.substitute(&s)).collect();
        eliminated.push((*d, nu));
    }
    Ok(Simplified { types, rho, eliminated })
}

/// Joins the left-hand sides of constraints sharing a right-hand side.
pub fn merge_by_rhs(rho: &ConstraintSet) -> ConstraintSet {
    let mut by_rhs: BTreeMap<SecType, Vec<SecType>> = BTreeMap::new();
    for c in rho.iter() {
        by_rhs.entry(c.rhs.clone()).or_default().push(c.lhs.clone());
    }
    by_rhs.into_iter().map(|(rhs, lhs)| Constraint::new(SecType::join_all(lhs), rhs)).collect()
}

/// Everything computed while typing one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeTyping {
    pub signature: NodeSignature,
    /// The environment the equations were typed in.
    pub env: TypeEnv,
    /// Flattened constraints before elimination.
    pub constraints: ConstraintSet,
    /// Variables eliminated, locals first, then call outputs.
    pub eliminated: Vec<TVar>,
    /// Each local's type in terms of the signature variables.
    pub local_types: BTreeMap<Ident, SecType>,
}

/// Types a node against the signatures of its callees.
pub fn type_node(p: &Program, sigs: &SignatureEnv, n: &Node) -> Result<NodeTyping, TypeError> {
    let clocks = infer_clocks(p, n)?;
    let gamma = TVar::new(VarClass::Clock, 0);
    let mut env = TypeEnv::new(SecType::Var(gamma));
    let var = |class, i: usize| TVar::new(class, i as u32 + 1);
    let inputs: Vec<TVar> = (0..n.inputs.len()).map(|i| var(VarClass::Input, i)).collect();
    let outputs: Vec<TVar> = (0..n.outputs.len()).map(|i| var(VarClass::Output, i)).collect();
    let locals: Vec<TVar> = (0..n.locals.len()).map(|i| var(VarClass::Local, i)).collect();
    for (d, v) in
        n.inputs.iter().zip(&inputs).chain(n.outputs.iter().zip(&outputs)).chain(n.locals.iter().zip(&locals))
    {
        env.insert(d.name.clone(), SecType::Var(*v));
    }

    let mut typer = Typer::new(p, sigs, &clocks);
    let mut constraints = ConstraintSet::new();
    for eq in n.body.lustre_equations() {
        let rho = typer.type_equation(&env, &eq)?;
        constraints.0.extend(rho.0);
    }
    let constraints = ConstraintSet::from_constraints(constraints.0);
    let deltas: Vec<TVar> = locals.iter().chain(typer.call_vars()).copied().collect();
    let types: Vec<SecType> = outputs.iter().map(|b| SecType::Var(*b)).collect();
    let simplified = simplify(&types, &constraints, &deltas)?;
    let resolved = simplified.resolved();
    let local_types =
        n.locals.iter().zip(&locals).map(|(d, v)| (d.name.clone(), resolved[v].clone())).collect();

    let signature = NodeSignature {
        name: n.name.clone(),
        inputs,
        outputs,
        clock: gamma,
        rho: merge_by_rhs(&simplified.rho),
        input_names: n.inputs.iter().map(|d| d.name.clone()).collect(),
        output_names: n.outputs.iter().map(|d| d.name.clone()).collect(),
    };
    Ok(NodeTyping { signature, env, constraints, eliminated: deltas, local_types })
}

pub fn node_signature(p: &Program, sigs: &SignatureEnv, n: &Node) -> Result<NodeSignature, TypeError> {
    type_node(p, sigs, n).map(|t| t.signature)
}

/// Signatures of every node, computed callees first.
pub fn check_program(p: &Program) -> Result<SignatureEnv, TypeError> {
    let order = p.topological_order().map_err(TypeError::Recursive)?;
    let mut sigs = SignatureEnv::new();
    for n in order {
        let sig = node_signature(p, &sigs, n)?;
        sigs.insert(n.name.clone(), sig);
    }
    Ok(sigs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Body;
    use crate::parser::{parse_nlustre, parse_program};

    const CNT_DN: &str = "node cnt_dn(res: bool; n: int) returns (cpt: int) \
        let cpt = if res then n else (n fby (cpt - 1)); tel";

    const RE_TRIG: &str = "node re_trig(i: bool; n: int) returns (o: bool) \
        var edge, c: bool; v: int; \
        let edge = i and (false fby (not i)); \
        c = edge or (false fby o); \
        v = merge c (cnt_dn((edge, n) when c)) (0 when not c); \
        o = v > 0; tel";

    fn g() -> SecType {
        SecType::Var(TVar::new(VarClass::Clock, 0))
    }

    fn a(i: u32) -> SecType {
        SecType::Var(TVar::new(VarClass::Input, i))
    }

    fn b(i: u32) -> SecType {
        SecType::Var(TVar::new(VarClass::Output, i))
    }

    fn d(i: u32) -> SecType {
        SecType::Var(TVar::new(VarClass::Local, i))
    }

    fn sigs_of(src: &str) -> SignatureEnv {
        check_program(&parse_program(src).unwrap()).unwrap()
    }

    #[test]
    fn clock_types() {
        let mut env = TypeEnv::new(g());
        env.insert("x", a(1));
        env.insert("y", b(1));
        assert_eq!(type_clock(&env, &Clock::Base).unwrap(), g());
        let on = Clock::Base.on("x", true);
        assert_eq!(type_clock(&env, &on).unwrap(), SecType::join(g(), a(1)));
        let on2 = on.on("y", false);
        assert_eq!(type_clock(&env, &on2).unwrap(), SecType::join_all([g(), a(1), b(1)]));
        assert_eq!(type_clock(&env, &Clock::Base.on("z", true)), Err(TypeError::Unbound("z".into())));
    }

    #[test]
    fn expression_types() {
        let p = parse_program("node f(i: bool) returns (o: bool) let o = i and (false fby (not i)); tel")
            .unwrap();
        let clocks = infer_clocks(&p, &p.nodes[0]).unwrap();
        let sigs = SignatureEnv::new();
        let mut typer = Typer::new(&p, &sigs, &clocks);
        let mut env = TypeEnv::new(g());
        env.insert("i", a(1));
        assert_eq!(typer.type_expr(&env, &Expr::int(0)).unwrap(), vec![SecType::Bot]);
        let Body::Lustre(eqs) = &p.nodes[0].body else { unreachable!() };
        assert_eq!(typer.type_expr(&env, &eqs[0].rhs[0]).unwrap(), vec![a(1)]);
    }

    #[test]
    fn call_result_passed_to_ignored_input() {
        let src = "node k(x: int; y: int) returns (o: int) let o = x; tel
                   node f(x: int) returns (o: int) let o = x + 1; tel
                   node m(a: int; b: int) returns (o: int) let o = k(a, f(b)); tel";
        let p = parse_program(src).unwrap();
        let sigs = check_program(&p).unwrap();
        assert_eq!(sigs["m"].render(), "m(a1,a2) =>g (b) { g|a1 <= b }");
        let n = crate::normalise::normalize_program(&p).unwrap();
        assert_eq!(check_program(&n).unwrap()["m"], sigs["m"]);
    }

    #[test]
    fn constant_equation_on_base() {
        let p = parse_program("node f() returns (x: int) let x = 0; tel").unwrap();
        let clocks = infer_clocks(&p, &p.nodes[0]).unwrap();
        let sigs = SignatureEnv::new();
        let mut env = TypeEnv::new(g());
        env.insert("x", b(1));
        let rho =
            Typer::new(&p, &sigs, &clocks).type_equation(&env, &Equation::simple("x", Expr::int(0))).unwrap();
        assert_eq!(rho, ConstraintSet::from_constraints([Constraint::new(g(), b(1))]));
    }

    #[test]
    fn nested_call_is_typed_with_refinement() {
        let src = format!("{} {}", CNT_DN, RE_TRIG);
        let p = parse_program(&src).unwrap();
        let sigs = check_program(&p).unwrap();
        let n = p.node("re_trig").unwrap();
        let clocks = infer_clocks(&p, n).unwrap();
        let mut env = TypeEnv::new(g());
        for (x, t) in [("i", a(1)), ("n", a(2)), ("o", b(1)), ("edge", d(1)), ("c", d(2)), ("v", d(3))] {
            env.insert(x, t);
        }
        let Body::Lustre(eqs) = &n.body else { unreachable!() };
        let mut typer = Typer::new(&p, &sigs, &clocks);
        let call = match &eqs[2].rhs[0] {
            Expr::Merge(_, ts, _) => ts[0].clone(),
            e => panic!("unexpected {:?}", e),
        };
        let c6 = SecType::Var(TVar::new(VarClass::Call, 1));
        let rho = ConstraintSet::from_constraints([Constraint::new(
            SecType::join_all([g(), d(2), d(1), a(2)]),
            c6.clone(),
        )]);
        assert_eq!(typer.type_expr(&env, &call).unwrap(), vec![SecType::refine(c6, rho)]);

        // The equation for `c`: γ ⊔ δ1 ⊔ ⊥ ⊔ β ⊑ δ2.
        let rho2 = typer.type_equation(&env, &eqs[1]).unwrap();
        let expected = Constraint::new(SecType::join_all([g(), d(1), b(1)]), d(2));
        assert_eq!(rho2, ConstraintSet::from_constraints([expected]));
    }

    #[test]
    fn golden_signatures() {
        let sigs = sigs_of(&format!("{} {}", CNT_DN, RE_TRIG));
        assert_eq!(sigs["cnt_dn"].render(), "cnt_dn(a1,a2) =>g (b) { g|a1|a2 <= b }");
        assert_eq!(sigs["re_trig"].render(), "re_trig(a1,a2) =>g (b) { g|a1|a2 <= b }");
    }

    #[test]
    fn normalised_cnt_dn_has_the_same_signature() {
        let src = "node cnt_dn(res: bool; n: int) returns (cpt: int) var v14, v24, v25: int; let \
                   v24 :: base = true fby false; \
                   v25 :: base = 0 fby (cpt - 1); \
                   v14 :: base = if v24 then n else v25; \
                   cpt :: base = if res then n else v14; tel";
        let p = parse_nlustre(&src.replace("v14, v24, v25: int", "v14: int; v24: bool; v25: int")).unwrap();
        let sigs = check_program(&p).unwrap();
        assert_eq!(sigs["cnt_dn"].render(), "cnt_dn(a1,a2) =>g (b) { g|a1|a2 <= b }");
    }

    #[test]
    fn identity_node() {
        let sigs = sigs_of("node id(x: int) returns (o: int) let o = x; tel");
        assert_eq!(
            sigs["id"].rho,
            ConstraintSet::from_constraints([Constraint::new(SecType::join(g(), a(1)), b(1))])
        );
    }

    #[test]
    fn simplify_without_variables_is_identity() {
        let rho = ConstraintSet::from_constraints([Constraint::new(a(1), b(1))]);
        let s = simplify(&[b(1)], &rho, &[]).unwrap();
        assert_eq!((s.types, s.rho), (vec![b(1)], rho));
    }

    #[test]
    fn simplify_eliminates_in_order() {
        let rho = ConstraintSet::from_constraints([
            Constraint::new(g(), d(2)),
            Constraint::new(SecType::join_all([g(), b(1)]), d(3)),
            Constraint::new(SecType::join_all([g(), d(2), d(3)]), d(1)),
            Constraint::new(SecType::join_all([g(), a(1), a(2), d(1)]), b(1)),
        ]);
        let ds: Vec<TVar> = (1..=3).map(|i| TVar::new(VarClass::Local, i)).collect();
        let s = simplify(&[b(1)], &rho, &ds).unwrap();
        assert_eq!(
            s.rho,
            ConstraintSet::from_constraints([Constraint::new(SecType::join_all([g(), a(1), a(2)]), b(1))])
        );
        let r = s.resolved();
        assert_eq!(r[&ds[0]], SecType::join(g(), b(1)));
        assert_eq!(r[&ds[1]], g());
    }

    #[test]
    fn simplify_rejects_missing_and_duplicate_definitions() {
        let dv = TVar::new(VarClass::Local, 1);
        let none = simplify(&[], &ConstraintSet::new(), &[dv]);
        assert_eq!(none, Err(TypeError::NotUniquelyDefined { var: dv, count: 0 }));
        let two = ConstraintSet::from_constraints([Constraint::new(a(1), d(1)), Constraint::new(a(2), d(1))]);
        assert!(matches!(simplify(&[], &two, &[dv]), Err(TypeError::NotUniquelyDefined { count: 2, .. })));
    }

    #[test]
    fn program_level_errors() {
        assert!(check_program(&Program::default()).unwrap().is_empty());
        let p = parse_program("node f(x: int) returns (o: int) let o = g(x); tel").unwrap();
        assert!(check_program(&p).is_err());
    }

    #[test]
    fn multiple_outputs_render_numbered() {
        let sigs = sigs_of("node sw(x, y: int) returns (p, q: int) let p, q = y, x; tel");
        assert_eq!(sigs["sw"].render(), "sw(a1,a2) =>g (b1,b2) { g|a2 <= b1, g|a1 <= b2 }");
    }

    #[test]
    fn call_sites_get_distinct_variables() {
        let sigs = sigs_of(
            "node id(x: int) returns (o: int) let o = x; tel \
             node two(x, y: int) returns (o: int) let o = id(x) + id(y); tel",
        );
        assert_eq!(sigs["two"].render(), "two(a1,a2) =>g (b) { g|a1|a2 <= b }");
    }
}
