//! Ground evaluation of security types and constraint implication.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{flatten_constraints, ConstraintSet, Lattice, Level, SecType, TVar};

/// A mapping from type variables to lattice elements.
pub type GroundInstantiation = BTreeMap<TVar, Level>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("type variable {0} has no level")]
pub struct Unbound(pub TVar);

/// Evaluates `t` under `s`. `Ok(None)` means the term is undefined: one of
/// its refinements does not hold.
pub fn eval_ground(lat: &Lattice, s: &GroundInstantiation, t: &SecType) -> Result<Option<Level>, Unbound> {
    match t {
        SecType::Bot => Ok(Some(lat.bottom())),
        SecType::Var(v) => s.get(v).copied().map(Some).ok_or(Unbound(*v)),
        SecType::Refine(base, rho) => {
            let b = eval_ground(lat, s, base)?;
            Ok(if satisfies(lat, s, rho)? { b } else { None })
        }
        SecType::Join(ts) => {
            let mut acc = Some(lat.bottom());
            for t in ts {
                let v = eval_ground(lat, s, t)?;
                acc = match (acc, v) {
                    (Some(a), Some(b)) => Some(lat.join(a, b)),
                    _ => None,
                };
            }
            Ok(acc)
        }
    }
}

/// Whether every constraint holds under `s`. A constraint with an undefined
/// side does not hold.
pub fn satisfies(lat: &Lattice, s: &GroundInstantiation, rho: &ConstraintSet) -> Result<bool, Unbound> {
    for c in rho.iter() {
        let l = eval_ground(lat, s, &c.lhs)?;
        let r = eval_ground(lat, s, &c.rhs)?;
        match (l, r) {
            (Some(l), Some(r)) if lat.leq(l, r) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implication {
    pub holds: bool,
    pub method: Method,
    /// An instantiation satisfying the premise but not the conclusion.
    pub witness: Option<GroundInstantiation>,
}

const EXHAUSTIVE_LIMIT: usize = 24;
const SAMPLES: usize = 100_000;
const SAMPLE_SEED: u64 = 0x5ec1;

/// Bitmask form of a refinement-free constraint over the two-point lattice.
struct Masks {
    lhs: Vec<u64>,
    rhs: Vec<u64>,
}

fn masks(rho: &ConstraintSet, index: &BTreeMap<TVar, usize>, words: usize) -> Vec<Masks> {
    let to_mask = |vars: BTreeSet<TVar>| {
        let mut m = vec![0u64; words];
        for v in vars {
            let i = index[&v];
            m[i / 64] |= 1 << (i % 64);
        }
        m
    };
    rho.iter().map(|c| Masks { lhs: to_mask(c.lhs.atoms()), rhs: to_mask(c.rhs.atoms()) }).collect()
}

fn holds(cs: &[Masks], a: &[u64]) -> bool {
    cs.iter().all(|c| {
        let lhs_high = c.lhs.iter().zip(a).any(|(m, a)| m & a != 0);
        !lhs_high || c.rhs.iter().zip(a).any(|(m, a)| m & a != 0)
    })
}

/// Whether every two-point instantiation satisfying `rho` also satisfies
/// `rho2`. Inequalities between joins hold in every lattice exactly when
/// they hold in the two-point one, so this decides implication in general.
pub fn implies(rho: &ConstraintSet, rho2: &ConstraintSet, vars: &BTreeSet<TVar>) -> Implication {
    let (rho, rho2) = (flatten_constraints(rho), flatten_constraints(rho2));
    let mut all: BTreeSet<TVar> = vars.clone();
    all.extend(rho.vars());
    all.extend(rho2.vars());
    let order: Vec<TVar> = all.into_iter().collect();
    let index: BTreeMap<TVar, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = order.len();
    let words = n.div_ceil(64).max(1);
    let (p, q) = (masks(&rho, &index, words), masks(&rho2, &index, words));
    let witness_of = |a: &[u64]| -> GroundInstantiation {
        order.iter().enumerate().map(|(i, v)| (*v, Level(((a[i / 64] >> (i % 64)) & 1) as usize))).collect()
    };

    if n <= EXHAUSTIVE_LIMIT {
        for bits in 0u64..(1u64 << n) {
            let a = [bits];
            if holds(&p, &a) && !holds(&q, &a) {
                return Implication {
                    holds: false,
                    method: Method::Exhaustive,
                    witness: Some(witness_of(&a)),
                };
            }
        }
        return Implication { holds: true, method: Method::Exhaustive, witness: None };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut a = vec![0u64; words];
    for _ in 0..SAMPLES {
        for w in a.iter_mut() {
            *w = rng.gen();
        }
        if !n.is_multiple_of(64) {
            a[words - 1] &= (1u64 << (n % 64)) - 1;
        }
        if holds(&p, &a) && !holds(&q, &a) {
            return Implication {
                holds: false,
                method: Method::Probabilistic,
                witness: Some(witness_of(&a)),
            };
        }
    }
    Implication { holds: true, method: Method::Probabilistic, witness: None }
}

/// Implication checked over a given lattice: exhaustively when there are
/// at most `10^6` instantiations, otherwise on random samples.
pub fn implies_over(
    lat: &Lattice,
    rho: &ConstraintSet,
    rho2: &ConstraintSet,
    vars: &BTreeSet<TVar>,
) -> Implication {
    let mut all: BTreeSet<TVar> = vars.clone();
    all.extend(rho.vars());
    all.extend(rho2.vars());
    let order: Vec<TVar> = all.into_iter().collect();
    let k = lat.size();
    let total = (k as f64).powi(order.len() as i32);
    let check = |levels: &[usize]| -> Option<GroundInstantiation> {
        let s: GroundInstantiation = order.iter().zip(levels).map(|(v, l)| (*v, Level(*l))).collect();
        let p = satisfies(lat, &s, rho).unwrap_or(false);
        (p && !satisfies(lat, &s, rho2).unwrap_or(false)).then_some(s)
    };
    if total <= 1e6 {
        let mut levels = vec![0usize; order.len()];
        loop {
            if let Some(w) = check(&levels) {
                return Implication { holds: false, method: Method::Exhaustive, witness: Some(w) };
            }
            // Odometer increment.
            let mut i = 0;
            loop {
                if i == levels.len() {
                    return Implication { holds: true, method: Method::Exhaustive, witness: None };
                }
                levels[i] += 1;
                if levels[i] < k {
                    break;
                }
                levels[i] = 0;
                i += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for _ in 0..SAMPLES {
        let levels: Vec<usize> = (0..order.len()).map(|_| rng.gen_range(0..k)).collect();
        if let Some(w) = check(&levels) {
            return Implication { holds: false, method: Method::Probabilistic, witness: Some(w) };
        }
    }
    Implication { holds: true, method: Method::Probabilistic, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectype::Constraint;

    fn v(i: u32) -> SecType {
        SecType::Var(TVar::generic(i))
    }

    fn t(i: u32) -> TVar {
        TVar::generic(i)
    }

    fn set(cs: Vec<(SecType, SecType)>) -> ConstraintSet {
        ConstraintSet(cs.into_iter().map(|(l, r)| Constraint::new(l, r)).collect())
    }

    #[test]
    fn ground_evaluation() {
        let l = Lattice::two_point();
        let (lo, hi) = (Level(0), Level(1));
        let s: GroundInstantiation = [(t(1), hi), (t(2), lo)].into();
        assert_eq!(eval_ground(&l, &s, &SecType::join(v(1), v(2))), Ok(Some(hi)));
        assert_eq!(eval_ground(&l, &s, &SecType::Bot), Ok(Some(lo)));
        let refined = SecType::refine(v(1), set(vec![(v(1), v(2))]));
        assert_eq!(eval_ground(&l, &s, &refined), Ok(None));
        assert_eq!(eval_ground(&l, &s, &v(3)), Err(Unbound(t(3))));
    }

    #[test]
    fn satisfaction() {
        let l = Lattice::two_point();
        let rho = set(vec![(v(1), v(2))]);
        assert!(satisfies(&l, &[(t(1), Level(0)), (t(2), Level(1))].into(), &rho).unwrap());
        assert!(!satisfies(&l, &[(t(1), Level(1)), (t(2), Level(0))].into(), &rho).unwrap());
        let join = set(vec![(SecType::join_all([v(0), v(1), v(2)]), v(3))]);
        let s = [(t(0), Level(0)), (t(1), Level(0)), (t(2), Level(1)), (t(3), Level(1))].into();
        assert!(satisfies(&l, &s, &join).unwrap());
    }

    #[test]
    fn implication_examples() {
        let vars: BTreeSet<TVar> = [t(1), t(2), t(3)].into();
        let a = set(vec![(v(1), v(2))]);
        let b = set(vec![(v(1), SecType::join(v(2), v(3)))]);
        assert!(implies(&a, &b, &vars).holds);
        assert!(implies(&a, &a, &vars).holds);
        let r = implies(&ConstraintSet::new(), &set(vec![(v(1), SecType::Bot)]), &[t(1)].into());
        assert!(!r.holds);
        assert_eq!(r.witness, Some([(t(1), Level(1))].into()));
        assert_eq!(r.method, Method::Exhaustive);
    }

    #[test]
    fn large_variable_sets_are_sampled() {
        let vars: BTreeSet<TVar> = (0..30).map(t).collect();
        let a = set(vec![(v(1), v(2))]);
        let r = implies(&a, &a, &vars);
        assert!(r.holds);
        assert_eq!(r.method, Method::Probabilistic);
        let r = implies(&ConstraintSet::new(), &a, &vars);
        assert!(!r.holds);
    }

    #[test]
    fn implication_over_powerset_agrees() {
        let l = Lattice::powerset(2).unwrap();
        let vars: BTreeSet<TVar> = [t(1), t(2), t(3)].into();
        let a = set(vec![(v(1), v(2))]);
        let b = set(vec![(v(1), SecType::join(v(2), v(3)))]);
        assert!(implies_over(&l, &a, &b, &vars).holds);
        assert!(!implies_over(&l, &b, &a, &vars).holds);
    }
}
