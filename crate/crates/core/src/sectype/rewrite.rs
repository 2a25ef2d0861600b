//! Single rewrite steps of the equational theory on security types.
//!
//! Each step applies one equation, in either direction, at one position of
//! a term. Canonicalisation is a composition of such steps, so the steps are
//! what ground-evaluation soundness is checked against.

use super::{Constraint, ConstraintSet, SecType};

/// All terms reachable from `t` by one rewrite step.
pub fn single_steps(t: &SecType) -> Vec<SecType> {
    let mut out = root_steps(t);
    match t {
        SecType::Bot | SecType::Var(_) => {}
        SecType::Refine(base, rho) => {
            for b in single_steps(base) {
                out.push(SecType::Refine(Box::new(b), rho.clone()));
            }
            for r in set_steps(rho) {
                out.push(SecType::Refine(base.clone(), r));
            }
        }
        SecType::Join(ts) => {
            for (i, ti) in ts.iter().enumerate() {
                for s in single_steps(ti) {
                    let mut ts2 = ts.clone();
                    ts2[i] = s;
                    out.push(SecType::Join(ts2));
                }
            }
        }
    }
    out
}

fn set_steps(rho: &ConstraintSet) -> Vec<ConstraintSet> {
    let mut out = Vec::new();
    for c in rho.iter() {
        let rest: Vec<Constraint> = rho.iter().filter(|d| *d != c).cloned().collect();
        let with = |c2: Constraint| ConstraintSet(rest.iter().cloned().chain([c2]).collect());
        for l in single_steps(&c.lhs) {
            out.push(with(Constraint::new(l, c.rhs.clone())));
        }
        for r in single_steps(&c.rhs) {
            out.push(with(Constraint::new(c.lhs.clone(), r)));
        }
    }
    out
}

/// Steps applying an equation at the root of `t`.
fn root_steps(t: &SecType) -> Vec<SecType> {
    let mut out = Vec::new();
    // α ⊔ ⊥ = α, read right to left, and α{| |} = α, read right to left.
    out.push(SecType::Join(vec![t.clone(), SecType::Bot]));
    out.push(SecType::Refine(Box::new(t.clone()), ConstraintSet::new()));
    match t {
        SecType::Join(ts) => {
            // Unit.
            for (i, ti) in ts.iter().enumerate() {
                if *ti == SecType::Bot {
                    let mut ts2 = ts.clone();
                    ts2.remove(i);
                    out.push(collapse(ts2));
                }
            }
            // Idempotence, both directions.
            for i in 0..ts.len() {
                for j in i + 1..ts.len() {
                    if ts[i] == ts[j] {
                        let mut ts2 = ts.clone();
                        ts2.remove(j);
                        out.push(collapse(ts2));
                    }
                }
                let mut ts2 = ts.clone();
                ts2.insert(i, ts[i].clone());
                out.push(SecType::Join(ts2));
            }
            // Commutativity.
            for i in 0..ts.len() {
                for j in i + 1..ts.len() {
                    let mut ts2 = ts.clone();
                    ts2.swap(i, j);
                    out.push(SecType::Join(ts2));
                }
            }
            // Associativity: splice a nested join, or group a pair.
            for (i, ti) in ts.iter().enumerate() {
                if let SecType::Join(inner) = ti {
                    let mut ts2 = ts[..i].to_vec();
                    ts2.extend(inner.iter().cloned());
                    ts2.extend(ts[i + 1..].iter().cloned());
                    out.push(SecType::Join(ts2));
                }
            }
            if ts.len() > 2 {
                for i in 0..ts.len() - 1 {
                    let mut ts2 = ts[..i].to_vec();
                    ts2.push(SecType::Join(vec![ts[i].clone(), ts[i + 1].clone()]));
                    ts2.extend(ts[i + 2..].iter().cloned());
                    out.push(SecType::Join(ts2));
                }
            }
            // α1{|ρ1|} ⊔ α2{|ρ2|} = (α1 ⊔ α2){|ρ1 ∪ ρ2|}, lifting one refinement.
            for (i, ti) in ts.iter().enumerate() {
                if let SecType::Refine(base, rho) = ti {
                    let mut ts2 = ts.clone();
                    ts2[i] = (**base).clone();
                    out.push(SecType::Refine(Box::new(SecType::Join(ts2)), rho.clone()));
                }
            }
        }
        SecType::Refine(base, rho) => {
            if rho.is_empty() {
                out.push((**base).clone());
            }
            // α{|ρ1|}{|ρ2|} = α{|ρ1 ∪ ρ2|}.
            if let SecType::Refine(inner, rho1) = base.as_ref() {
                let merged = ConstraintSet(rho1.0.union(&rho.0).cloned().collect());
                out.push(SecType::Refine(inner.clone(), merged));
            }
            // Pushing the refinement into a join argument.
            if let SecType::Join(ts) = base.as_ref() {
                for i in 0..ts.len() {
                    let mut ts2 = ts.clone();
                    ts2[i] = SecType::Refine(Box::new(ts[i].clone()), rho.clone());
                    out.push(SecType::Join(ts2));
                }
            }
        }
        SecType::Bot | SecType::Var(_) => {}
    }
    out
}

fn collapse(mut ts: Vec<SecType>) -> SecType {
    match ts.len() {
        0 => SecType::Bot,
        1 => ts.pop().unwrap(),
        _ => SecType::Join(ts),
    }
}
