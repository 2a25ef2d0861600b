//! Security policies: levels assigned to a node's interface, checked
//! against its signature.

use std::collections::BTreeMap;

use thiserror::Error;

use super::NodeSignature;
use crate::ast::Ident;
use crate::sectype::{eval_ground, Constraint, ConstraintSet, GroundInstantiation, Lattice, Level, SecType};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("policy line {0}: expected `name = LEVEL`, found {1:?}")]
    Syntax(usize, String),
    #[error("policy line {line}: unknown level {level}")]
    UnknownLevel { line: usize, level: String },
    #[error("policy line {line}: node {node} has no interface variable {name}")]
    UnknownName { line: usize, node: Ident, name: Ident },
    #[error("policy for node {node} gives no level to {}", .missing.join(", "))]
    Incomplete { node: Ident, missing: Vec<Ident> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    node: Option<Ident>,
    name: Ident,
    level: String,
    line: usize,
}

/// Lines `name = LEVEL` or `node.name = LEVEL`; `base` names the node's
/// base clock and `#` starts a comment. Unqualified names apply to every
/// node with an interface variable of that name; qualified ones take
/// precedence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Policy {
    entries: Vec<Entry>,
}

impl Policy {
    pub fn parse(text: &str) -> Result<Policy, PolicyError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || PolicyError::Syntax(i + 1, line.to_string());
            let (lhs, level) = line.split_once('=').ok_or_else(bad)?;
            let (lhs, level) = (lhs.trim(), level.trim());
            let ident = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_');
            let (node, name) = match lhs.split_once('.') {
                Some((n, x)) => (Some(n.trim().to_string()), x.trim().to_string()),
                None => (None, lhs.to_string()),
            };
            if !ident(&name) || !node.as_deref().is_none_or(ident) || level.is_empty() {
                return Err(bad());
            }
            entries.push(Entry { node, name, level: level.to_string(), line: i + 1 });
        }
        Ok(Policy { entries })
    }

    /// Builds a policy from unqualified `(name, level)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Policy {
        let entries = pairs
            .into_iter()
            .map(|(n, l)| Entry { node: None, name: n.to_string(), level: l.to_string(), line: 0 })
            .collect();
        Policy { entries }
    }

    /// The levels this policy gives to `sig`'s interface, keyed by
    /// interface name (`base` for the clock). `Ok(None)` when no entry
    /// concerns the node.
    pub fn levels_for(
        &self,
        sig: &NodeSignature,
        lat: &Lattice,
    ) -> Result<Option<BTreeMap<Ident, Level>>, PolicyError> {
        let mut out = BTreeMap::new();
        let mut mentioned = false;
        let level = |e: &Entry| {
            lat.by_name(&e.level)
                .ok_or_else(|| PolicyError::UnknownLevel { line: e.line, level: e.level.clone() })
        };
        for e in self.entries.iter().filter(|e| e.node.is_none()) {
            if sig.role(&e.name).is_some() {
                mentioned |= e.name != "base";
                out.insert(e.name.clone(), level(e)?);
            }
        }
        for e in self.entries.iter().filter(|e| e.node.as_deref() == Some(sig.name.as_str())) {
            if sig.role(&e.name).is_none() {
                return Err(PolicyError::UnknownName {
                    line: e.line,
                    node: sig.name.clone(),
                    name: e.name.clone(),
                });
            }
            mentioned = true;
            out.insert(e.name.clone(), level(e)?);
        }
        Ok(mentioned.then_some(out))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicyVerdict {
    Secure,
    Violation { constraint: Constraint, instantiation: GroundInstantiation },
}

impl PolicyVerdict {
    pub fn is_secure(&self) -> bool {
        matches!(self, PolicyVerdict::Secure)
    }
}

fn instantiate(
    sig: &NodeSignature,
    levels: &BTreeMap<Ident, Level>,
) -> Result<GroundInstantiation, PolicyError> {
    let mut s = GroundInstantiation::new();
    let mut missing = Vec::new();
    let names = sig.input_names.iter().chain(&sig.output_names).map(String::as_str).chain(["base"]);
    for name in names {
        match levels.get(name) {
            Some(l) => {
                s.insert(sig.role(name).expect("interface name"), *l);
            }
            None => missing.push(name.to_string()),
        }
    }
    if missing.is_empty() {
        Ok(s)
    } else {
        Err(PolicyError::Incomplete { node: sig.name.clone(), missing })
    }
}

/// Whether the instantiation given by the policy satisfies the signature's
/// constraints; on failure, the first violated constraint.
pub fn check_policy(
    sig: &NodeSignature,
    levels: &BTreeMap<Ident, Level>,
    lat: &Lattice,
) -> Result<PolicyVerdict, PolicyError> {
    let s = instantiate(sig, levels)?;
    let mut cs: Vec<&Constraint> = sig.rho.iter().collect();
    cs.sort_by(|x, y| (&x.rhs, &x.lhs).cmp(&(&y.rhs, &y.lhs)));
    for c in cs {
        let ok = matches!(
            (eval_ground(lat, &s, &c.lhs), eval_ground(lat, &s, &c.rhs)),
            (Ok(Some(l)), Ok(Some(r))) if lat.leq(l, r)
        );
        if !ok {
            return Ok(PolicyVerdict::Violation { constraint: c.clone(), instantiation: s });
        }
    }
    Ok(PolicyVerdict::Secure)
}

/// The least instantiation of the outputs that satisfies the signature,
/// given levels for the inputs and the clock.
pub fn minimal_instantiation(
    sig: &NodeSignature,
    input_levels: &[Level],
    clock_level: Level,
    lat: &Lattice,
) -> GroundInstantiation {
    let mut s: GroundInstantiation = sig.inputs.iter().copied().zip(input_levels.iter().copied()).collect();
    s.insert(sig.clock, clock_level);
    for b in &sig.outputs {
        s.insert(*b, lat.bottom());
    }
    raise_to_fixpoint(&mut s, &sig.rho, lat);
    s
}

/// Raises each right-hand variable to the join of its left-hand sides
/// until every constraint holds.
fn raise_to_fixpoint(s: &mut GroundInstantiation, rho: &ConstraintSet, lat: &Lattice) {
    loop {
        let mut changed = false;
        for c in rho.iter() {
            let SecType::Var(v) = &c.rhs else { continue };
            let Ok(Some(l)) = eval_ground(lat, s, &c.lhs) else { continue };
            let cur = s[v];
            let new = lat.join(cur, l);
            if new != cur {
                s.insert(*v, new);
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}
