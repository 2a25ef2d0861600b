use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seclus::sectype::gen::{random_instantiation, random_set, random_term, shuffle};
use seclus::sectype::rewrite::single_steps;
use seclus::sectype::{
    canonicalize, eval_ground, implies, ConstraintSet, GroundInstantiation, Lattice, SecType, TVar,
};

const NVARS: u32 = 6;

/// Powerset levels as bitmasks: join is union, order is inclusion, and an
/// unsatisfied refinement makes the whole term undefined.
fn oracle(s: &GroundInstantiation, t: &SecType) -> Option<usize> {
    match t {
        SecType::Bot => Some(0),
        SecType::Var(v) => Some(s[v].0),
        SecType::Refine(base, rho) => {
            let b = oracle(s, base);
            if oracle_holds(s, rho) {
                b
            } else {
                None
            }
        }
        SecType::Join(ts) => ts.iter().try_fold(0, |acc, t| oracle(s, t).map(|l| acc | l)),
    }
}

fn oracle_holds(s: &GroundInstantiation, rho: &ConstraintSet) -> bool {
    rho.iter().all(|c| match (oracle(s, &c.lhs), oracle(s, &c.rhs)) {
        (Some(l), Some(r)) => l & !r == 0,
        _ => false,
    })
}

fn vars() -> BTreeSet<TVar> {
    (0..NVARS).map(TVar::generic).collect()
}

/// Every instantiation of the variables in the powerset of `{0, 1}`.
fn all_instantiations() -> Vec<GroundInstantiation> {
    let n = NVARS as usize;
    (0..4usize.pow(NVARS))
        .map(|code| {
            (0..n).map(|i| (TVar::generic(i as u32), seclus::sectype::Level((code >> (2 * i)) & 3))).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_is_idempotent(seed: u64, depth in 0u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_term(&mut rng, NVARS, depth);
        let c = canonicalize(&t);
        prop_assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonical_form_ignores_grouping_and_order(seed: u64, depth in 0u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_term(&mut rng, NVARS, depth);
        let u = shuffle(&mut rng, &t);
        prop_assert_eq!(canonicalize(&u), canonicalize(&t));
    }

    #[test]
    fn canonical_form_keeps_meaning(seed: u64, depth in 0u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = Lattice::powerset(3).unwrap();
        let t = random_term(&mut rng, NVARS, depth);
        let c = canonicalize(&t);
        for _ in 0..8 {
            let s = random_instantiation(&mut rng, &lat, NVARS);
            prop_assert_eq!(oracle(&s, &c), oracle(&s, &t));
            prop_assert_eq!(eval_ground(&lat, &s, &t).unwrap().map(|l| l.0), oracle(&s, &t));
        }
    }

    #[test]
    fn rewrite_steps_are_confluent_and_sound(seed: u64, depth in 0u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = Lattice::powerset(2).unwrap();
        let t = random_term(&mut rng, NVARS, depth);
        let c = canonicalize(&t);
        let s = random_instantiation(&mut rng, &lat, NVARS);
        for u in single_steps(&t) {
            prop_assert_eq!(canonicalize(&u), c.clone());
            prop_assert_eq!(oracle(&s, &u), oracle(&s, &t));
        }
    }

    #[test]
    fn implication_matches_brute_force(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_set(&mut rng, NVARS, 2);
        let rho2 = random_set(&mut rng, NVARS, 2);
        let got = implies(&rho, &rho2, &vars());
        let counter = all_instantiations()
            .into_iter()
            .find(|s| oracle_holds(s, &rho) && !oracle_holds(s, &rho2));
        prop_assert_eq!(got.holds, counter.is_none(), "{} => {}", rho, rho2);
        if let Some(w) = got.witness {
            prop_assert!(oracle_holds(&w, &rho) && !oracle_holds(&w, &rho2));
        }
    }

    #[test]
    fn implication_is_reflexive_and_weakens(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_set(&mut rng, NVARS, 2);
        let extra = random_set(&mut rng, NVARS, 2);
        prop_assert!(implies(&rho, &rho, &vars()).holds);
        prop_assert!(implies(&rho.union(&extra), &rho, &vars()).holds);
    }
}
