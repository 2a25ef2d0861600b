//! Security-type terms: joins of type variables and `⊥`, refinement types
//! `α{|ρ|}`, and constraints `θ ⊑ α`.
//!
//! Terms are compared modulo associativity, commutativity and idempotence
//! of `⊔` by bringing them to a canonical form: joins are flat, sorted and
//! duplicate-free, `⊥` is dropped from joins, and refinements are pulled to
//! the top of a term.

mod eval;
pub mod gen;
mod lattice;
pub mod rewrite;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use eval::{
    eval_ground, implies, implies_over, satisfies, GroundInstantiation, Implication, Method, Unbound,
};
pub use lattice::{Lattice, LatticeError, Level};

/// What a type variable stands for. The declaration order fixes the order
/// in which variables print inside joins: clock, inputs, outputs, then the
/// rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarClass {
    Clock,
    Input,
    Output,
    Local,
    Call,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TVar {
    pub class: VarClass,
    pub index: u32,
}

impl TVar {
    pub fn new(class: VarClass, index: u32) -> TVar {
        TVar { class, index }
    }

    pub fn generic(index: u32) -> TVar {
        TVar::new(VarClass::Generic, index)
    }
}

impl fmt::Display for TVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.class {
            VarClass::Clock => "g",
            VarClass::Input => "a",
            VarClass::Output => "b",
            VarClass::Local => "d",
            VarClass::Call => "c",
            VarClass::Generic => "t",
        };
        if self.class == VarClass::Clock && self.index == 0 {
            f.write_str(prefix)
        } else {
            write!(f, "{}{}", prefix, self.index)
        }
    }
}

/// A security type. The variant order is the term order used to sort join
/// arguments: `⊥ < variables < refinements < joins`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SecType {
    Bot,
    Var(TVar),
    Refine(Box<SecType>, ConstraintSet),
    Join(Vec<SecType>),
}

/// `lhs ⊑ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub lhs: SecType,
    pub rhs: SecType,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintSet(pub BTreeSet<Constraint>);

pub type Subst = BTreeMap<TVar, SecType>;

impl SecType {
    pub fn var(v: TVar) -> SecType {
        SecType::Var(v)
    }

    pub fn refine(t: SecType, rho: ConstraintSet) -> SecType {
        SecType::Refine(Box::new(t), rho)
    }

    /// Canonical join of two terms.
    pub fn join(a: SecType, b: SecType) -> SecType {
        canonicalize(&SecType::Join(vec![a, b]))
    }

    /// Canonical join of any number of terms (`⊥` for none).
    pub fn join_all(ts: impl IntoIterator<Item = SecType>) -> SecType {
        canonicalize(&SecType::Join(ts.into_iter().collect()))
    }

    pub fn vars(&self) -> BTreeSet<TVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<TVar>) {
        match self {
            SecType::Bot => {}
            SecType::Var(v) => {
                out.insert(*v);
            }
            SecType::Refine(t, rho) => {
                t.collect_vars(out);
                rho.collect_vars(out);
            }
            SecType::Join(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Variables occurring outside refinements.
    pub fn atoms(&self) -> BTreeSet<TVar> {
        match self {
            SecType::Bot => BTreeSet::new(),
            SecType::Var(v) => [*v].into(),
            SecType::Refine(t, _) => t.atoms(),
            SecType::Join(ts) => ts.iter().flat_map(SecType::atoms).collect(),
        }
    }

    pub fn has_refinement(&self) -> bool {
        match self {
            SecType::Bot | SecType::Var(_) => false,
            SecType::Refine(..) => true,
            SecType::Join(ts) => ts.iter().any(SecType::has_refinement),
        }
    }

    /// Simultaneous substitution followed by canonicalisation.
    pub fn substitute(&self, s: &Subst) -> SecType {
        canonicalize(&self.subst_raw(s))
    }

    fn subst_raw(&self, s: &Subst) -> SecType {
        match self {
            SecType::Bot => SecType::Bot,
            SecType::Var(v) => s.get(v).cloned().unwrap_or(SecType::Var(*v)),
            SecType::Refine(t, rho) => SecType::Refine(Box::new(t.subst_raw(s)), rho.subst_raw(s)),
            SecType::Join(ts) => SecType::Join(ts.iter().map(|t| t.subst_raw(s)).collect()),
        }
    }

    /// Renders with a custom variable naming and join separator.
    pub fn render(&self, name: &dyn Fn(&TVar) -> String, sep: &str) -> String {
        match self {
            SecType::Bot => "bot".into(),
            SecType::Var(v) => name(v),
            SecType::Refine(t, rho) => {
                let base = match t.as_ref() {
                    SecType::Join(_) | SecType::Refine(..) => format!("({})", t.render(name, sep)),
                    _ => t.render(name, sep),
                };
                format!("{} {{{}}}", base, rho.render(name, sep))
            }
            SecType::Join(ts) if ts.is_empty() => "bot".into(),
            SecType::Join(ts) => ts
                .iter()
                .map(|t| match t {
                    SecType::Join(_) | SecType::Refine(..) => format!("({})", t.render(name, sep)),
                    _ => t.render(name, sep),
                })
                .collect::<Vec<_>>()
                .join(sep),
        }
    }
}

impl fmt::Display for SecType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|v| v.to_string(), " | "))
    }
}

impl Constraint {
    pub fn new(lhs: SecType, rhs: SecType) -> Constraint {
        Constraint { lhs, rhs }
    }

    pub fn vars(&self) -> BTreeSet<TVar> {
        let mut out = self.lhs.vars();
        out.extend(self.rhs.vars());
        out
    }

    pub fn substitute(&self, s: &Subst) -> Constraint {
        Constraint::new(self.lhs.substitute(s), self.rhs.substitute(s))
    }

    pub fn render(&self, name: &dyn Fn(&TVar) -> String, sep: &str) -> String {
        format!("{} <= {}", self.lhs.render(name, sep), self.rhs.render(name, sep))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&|v| v.to_string(), " | "))
    }
}

impl ConstraintSet {
    pub fn new() -> ConstraintSet {
        ConstraintSet::default()
    }

    /// A canonical set built from arbitrary constraints.
    pub fn from_constraints(cs: impl IntoIterator<Item = Constraint>) -> ConstraintSet {
        canonicalize_set(&ConstraintSet(cs.into_iter().collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.0.iter()
    }

    pub fn union(&self, other: &ConstraintSet) -> ConstraintSet {
        canonicalize_set(&ConstraintSet(self.0.union(&other.0).cloned().collect()))
    }

    pub fn vars(&self) -> BTreeSet<TVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<TVar>) {
        for c in &self.0 {
            c.lhs.collect_vars(out);
            c.rhs.collect_vars(out);
        }
    }

    pub fn substitute(&self, s: &Subst) -> ConstraintSet {
        canonicalize_set(&self.subst_raw(s))
    }

    fn subst_raw(&self, s: &Subst) -> ConstraintSet {
        ConstraintSet(
            self.0.iter().map(|c| Constraint::new(c.lhs.subst_raw(s), c.rhs.subst_raw(s))).collect(),
        )
    }

    pub fn render(&self, name: &dyn Fn(&TVar) -> String, sep: &str) -> String {
        self.0.iter().map(|c| c.render(name, sep)).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.render(&|v| v.to_string(), " | "))
    }
}

impl FromIterator<Constraint> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = Constraint>>(iter: I) -> ConstraintSet {
        ConstraintSet::from_constraints(iter)
    }
}

/// Canonical form of a term.
pub fn canonicalize(t: &SecType) -> SecType {
    match t {
        SecType::Bot | SecType::Var(_) => t.clone(),
        SecType::Refine(inner, rho) => {
            let (base, mut acc) = split_refinement(canonicalize(inner));
            acc.0.extend(canonicalize_set(rho).0);
            rebuild(base, canonicalize_set(&acc))
        }
        SecType::Join(ts) => {
            let mut atoms = Vec::new();
            let mut acc = ConstraintSet::new();
            for t in ts {
                let (base, rho) = split_refinement(canonicalize(t));
                acc.0.extend(rho.0);
                match base {
                    SecType::Bot => {}
                    SecType::Join(xs) => atoms.extend(xs),
                    other => atoms.push(other),
                }
            }
            atoms.sort();
            atoms.dedup();
            let base = match atoms.len() {
                0 => SecType::Bot,
                1 => atoms.pop().unwrap(),
                _ => SecType::Join(atoms),
            };
            rebuild(base, canonicalize_set(&acc))
        }
    }
}

/// Splits a canonical term into its refinement-free part and constraints.
fn split_refinement(t: SecType) -> (SecType, ConstraintSet) {
    match t {
        SecType::Refine(base, rho) => (*base, rho),
        other => (other, ConstraintSet::new()),
    }
}

fn rebuild(base: SecType, rho: ConstraintSet) -> SecType {
    if rho.is_empty() {
        base
    } else {
        SecType::Refine(Box::new(base), rho)
    }
}

/// Canonical form of a constraint set: both sides canonical, constraints
/// valid in every lattice dropped, and left-hand atoms already present on a
/// refinement-free right-hand side removed (`θ ⊔ β ⊑ β` is `θ ⊑ β`).
pub fn canonicalize_set(rho: &ConstraintSet) -> ConstraintSet {
    let mut out = BTreeSet::new();
    for c in &rho.0 {
        let lhs = canonicalize(&c.lhs);
        let rhs = canonicalize(&c.rhs);
        if lhs.has_refinement() || rhs.has_refinement() {
            out.insert(Constraint::new(lhs, rhs));
            continue;
        }
        let covered = rhs.atoms();
        let rest: Vec<SecType> = match lhs {
            SecType::Bot => vec![],
            SecType::Var(v) => vec![SecType::Var(v)],
            SecType::Join(xs) => xs,
            SecType::Refine(..) => unreachable!(),
        };
        let rest: Vec<SecType> =
            rest.into_iter().filter(|t| !matches!(t, SecType::Var(v) if covered.contains(v))).collect();
        if rest.is_empty() {
            continue;
        }
        out.insert(Constraint::new(SecType::join_all(rest), rhs));
    }
    ConstraintSet(out)
}

/// Removes every refinement from the constraints, adding the refinements'
/// own constraints to the set: `{α{|ρ1|} ⊑ β{|ρ2|}} = {α ⊑ β} ∪ ρ1 ∪ ρ2`.
pub fn flatten_constraints(rho: &ConstraintSet) -> ConstraintSet {
    let mut out = BTreeSet::new();
    for c in &rho.0 {
        let lhs = strip(&c.lhs, &mut out);
        let rhs = strip(&c.rhs, &mut out);
        out.insert(Constraint::new(lhs, rhs));
    }
    canonicalize_set(&ConstraintSet(out))
}

fn strip(t: &SecType, out: &mut BTreeSet<Constraint>) -> SecType {
    match t {
        SecType::Bot | SecType::Var(_) => t.clone(),
        SecType::Refine(base, rho) => {
            out.extend(flatten_constraints(rho).0);
            strip(base, out)
        }
        SecType::Join(ts) => SecType::join_all(ts.iter().map(|t| strip(t, out))),
    }
}

/// Separates a term into its refinement-free part and the flattened
/// constraints of its refinements.
pub fn strip_refinements(t: &SecType) -> (SecType, ConstraintSet) {
    let mut out = BTreeSet::new();
    let base = strip(t, &mut out);
    (base, canonicalize_set(&ConstraintSet(out)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> SecType {
        SecType::Var(TVar::generic(i))
    }

    fn c(l: SecType, r: SecType) -> Constraint {
        Constraint::new(l, r)
    }

    fn set(cs: Vec<Constraint>) -> ConstraintSet {
        ConstraintSet(cs.into_iter().collect())
    }

    #[test]
    fn join_units_and_idempotence() {
        assert_eq!(SecType::join(SecType::Bot, v(1)), v(1));
        assert_eq!(SecType::join(v(1), v(1)), v(1));
        assert_eq!(
            canonicalize(&SecType::Join(vec![SecType::Join(vec![v(1), v(2)]), v(1)])),
            SecType::Join(vec![v(1), v(2)])
        );
    }

    #[test]
    fn refinement_is_lifted_out_of_joins() {
        let r = set(vec![c(v(2), v(3))]);
        let t = SecType::join(SecType::refine(v(1), r.clone()), v(4));
        assert_eq!(t, SecType::refine(SecType::Join(vec![v(1), v(4)]), r));
    }

    #[test]
    fn nested_and_empty_refinements() {
        let r1 = set(vec![c(v(2), v(3))]);
        let r2 = set(vec![c(v(3), v(2))]);
        let t = SecType::refine(SecType::refine(v(1), r1.clone()), r2.clone());
        assert_eq!(canonicalize(&t), SecType::refine(v(1), r1.union(&r2)));
        assert_eq!(canonicalize(&SecType::refine(v(1), ConstraintSet::new())), v(1));
    }

    #[test]
    fn substitution_is_simultaneous_and_canonical() {
        let s: Subst = [(TVar::generic(4), v(5))].into();
        assert_eq!(SecType::join(v(1), v(4)).substitute(&s), SecType::join(v(1), v(5)));
        let cst = c(v(4), v(2)).substitute(&s);
        assert_eq!(cst, c(v(5), v(2)));
        let swap: Subst = [(TVar::generic(1), v(2)), (TVar::generic(2), v(1))].into();
        assert_eq!(c(v(1), v(2)).substitute(&swap), c(v(2), v(1)));
        // A refinement whose constraint becomes trivial disappears.
        let bot: Subst = [(TVar::generic(4), SecType::Bot)].into();
        let t = SecType::refine(v(1), set(vec![c(v(4), v(2))]));
        assert_eq!(t.substitute(&bot), v(1));
    }

    #[test]
    fn trivial_constraints_are_dropped() {
        let s = ConstraintSet::from_constraints(vec![
            c(SecType::Bot, v(1)),
            c(v(1), v(1)),
            c(v(1), SecType::join(v(1), v(3))),
            c(SecType::join(v(1), v(2)), v(2)),
        ]);
        assert_eq!(s, set(vec![c(v(1), v(2))]));
    }

    #[test]
    fn flattening_collects_refinement_constraints() {
        let r1 = set(vec![c(v(2), v(3))]);
        let r2 = set(vec![c(v(3), v(2))]);
        let rho = set(vec![c(SecType::refine(v(1), r1), SecType::refine(v(4), r2))]);
        assert_eq!(flatten_constraints(&rho), set(vec![c(v(1), v(4)), c(v(2), v(3)), c(v(3), v(2))]));
        let plain = set(vec![c(v(1), v(2))]);
        assert_eq!(flatten_constraints(&plain), plain);
    }

    #[test]
    fn display_forms() {
        let t = SecType::refine(SecType::join(v(1), v(2)), set(vec![c(v(3), v(4))]));
        assert_eq!(t.to_string(), "(t1 | t2) {t3 <= t4}");
        assert_eq!(SecType::Bot.to_string(), "bot");
        let g = TVar::new(VarClass::Clock, 0);
        let a1 = TVar::new(VarClass::Input, 1);
        assert_eq!(SecType::join(SecType::Var(a1), SecType::Var(g)).to_string(), "g | a1");
    }
}
