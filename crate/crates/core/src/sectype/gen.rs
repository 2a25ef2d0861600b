//! Random security-type terms for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Constraint, ConstraintSet, Lattice, Level, SecType, TVar};
use crate::sectype::GroundInstantiation;

/// A random, generally non-canonical term over variables `t0..t{nvars-1}`
/// of depth at most `depth`.
pub fn random_term<R: Rng>(rng: &mut R, nvars: u32, depth: u32) -> SecType {
    let leaf = |rng: &mut R| {
        if nvars == 0 || rng.gen_bool(0.15) {
            SecType::Bot
        } else {
            SecType::Var(TVar::generic(rng.gen_range(0..nvars)))
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..10) {
        0..=2 => leaf(rng),
        3..=7 => {
            let n = rng.gen_range(0..=4);
            SecType::Join((0..n).map(|_| random_term(rng, nvars, depth - 1)).collect())
        }
        _ => {
            let base = random_term(rng, nvars, depth - 1);
            SecType::Refine(Box::new(base), random_set(rng, nvars, depth - 1))
        }
    }
}

pub fn random_set<R: Rng>(rng: &mut R, nvars: u32, depth: u32) -> ConstraintSet {
    let n = rng.gen_range(0..=2);
    ConstraintSet(
        (0..n)
            .map(|_| Constraint::new(random_term(rng, nvars, depth), random_term(rng, nvars, depth)))
            .collect(),
    )
}

/// The same term modulo associativity and commutativity: join arguments
/// permuted and randomly regrouped at every level.
pub fn shuffle<R: Rng>(rng: &mut R, t: &SecType) -> SecType {
    match t {
        SecType::Bot | SecType::Var(_) => t.clone(),
        SecType::Refine(base, rho) => SecType::Refine(
            Box::new(shuffle(rng, base)),
            ConstraintSet(
                rho.iter().map(|c| Constraint::new(shuffle(rng, &c.lhs), shuffle(rng, &c.rhs))).collect(),
            ),
        ),
        SecType::Join(ts) => {
            let mut ts: Vec<SecType> = ts.iter().map(|t| shuffle(rng, t)).collect();
            ts.shuffle(rng);
            while ts.len() > 2 && rng.gen_bool(0.5) {
                let i = rng.gen_range(0..ts.len() - 1);
                let pair = SecType::Join(vec![ts[i].clone(), ts[i + 1].clone()]);
                ts.splice(i..i + 2, [pair]);
            }
            SecType::Join(ts)
        }
    }
}

/// A random instantiation of `t0..t{nvars-1}` in `lat`.
pub fn random_instantiation<R: Rng>(rng: &mut R, lat: &Lattice, nvars: u32) -> GroundInstantiation {
    (0..nvars).map(|i| (TVar::generic(i), Level(rng.gen_range(0..lat.size())))).collect()
}
