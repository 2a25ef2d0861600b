//! Non-interference testing: pairs of runs that agree on the inputs at or
//! below an observation level must agree on every variable at or below it.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{random_clock, random_stream, trial_rng, VerifyError};
use crate::ast::{Ident, Program, ValueType};
use crate::interp::{History, Interpreter};
use crate::sectype::{eval_ground, Lattice, Level};
use crate::typing::{check_program, minimal_instantiation, type_node};

/// How the base clocks of paired runs are drawn when the clock itself is
/// not observable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClockPairing {
    /// Both runs always share one base clock.
    #[default]
    Strict,
    /// When the clock level is above the observation level, each run draws
    /// its own base clock; pairs whose clocks differ are skipped.
    Skip,
}

impl std::str::FromStr for ClockPairing {
    type Err = String;

    fn from_str(s: &str) -> Result<ClockPairing, String> {
        match s {
            "strict" => Ok(ClockPairing::Strict),
            "skip" => Ok(ClockPairing::Skip),
            _ => Err(format!("unknown clock pairing {} (expected strict or skip)", s)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NIConfig {
    pub trials: usize,
    pub horizon: usize,
    pub seed: u64,
    pub pairing: ClockPairing,
}

impl Default for NIConfig {
    fn default() -> NIConfig {
        NIConfig { trials: 1000, horizon: 50, seed: 0, pairing: ClockPairing::Strict }
    }
}

/// Levels of a node's interface. Outputs left unset receive the least
/// levels allowed by the node's signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leveling {
    pub inputs: Vec<Level>,
    pub clock: Level,
    pub outputs: Option<Vec<Level>>,
}

impl Leveling {
    /// Reads a leveling from interface names, as produced by a policy.
    pub fn from_names(p: &Program, f: &str, levels: &BTreeMap<Ident, Level>, lat: &Lattice) -> Leveling {
        let node = p.node(f);
        let get = |x: &str| levels.get(x).copied();
        let inputs = node
            .map_or(Vec::new(), |n| n.inputs.iter().map(|d| get(&d.name).unwrap_or(lat.bottom())).collect());
        let outputs = node.and_then(|n| n.outputs.iter().map(|d| get(&d.name)).collect::<Option<Vec<_>>>());
        Leveling { inputs, clock: get("base").unwrap_or(lat.bottom()), outputs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NIViolation {
    pub trial: usize,
    pub seed: u64,
    pub var: Ident,
    pub instant: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NIReport {
    pub node: Ident,
    pub level: String,
    /// Input and clock levels of the run, by interface name.
    pub inputs: BTreeMap<Ident, String>,
    pub trials: usize,
    pub horizon: usize,
    pub observed: Vec<Ident>,
    pub skipped: usize,
    pub errors: usize,
    pub violation_count: usize,
    /// The first few violations, by trial.
    pub violations: Vec<NIViolation>,
    pub pass: bool,
}

const KEPT_VIOLATIONS: usize = 10;

fn input_levels(p: &Program, f: &str, lat: &Lattice, lv: &Leveling) -> BTreeMap<Ident, String> {
    let names = p.node(f).map_or(Vec::new(), |n| n.inputs.iter().map(|d| d.name.clone()).collect());
    let mut out: BTreeMap<Ident, String> =
        names.into_iter().zip(&lv.inputs).map(|(x, l)| (x, lat.name(*l).to_string())).collect();
    out.insert("base".into(), lat.name(lv.clock).to_string());
    out
}

/// The level of every variable of node `f`: inputs, clock and outputs from
/// the leveling, locals by evaluating their types under it.
pub fn variable_levels(
    p: &Program,
    f: &str,
    lat: &Lattice,
    lv: &Leveling,
) -> Result<BTreeMap<Ident, Level>, VerifyError> {
    let node = p.node(f).ok_or_else(|| VerifyError::UnknownNode(f.to_string()))?;
    if lv.inputs.len() != node.inputs.len() {
        return Err(VerifyError::Config(format!(
            "node {} has {} inputs, {} levels given",
            f,
            node.inputs.len(),
            lv.inputs.len()
        )));
    }
    let sigs = check_program(p)?;
    let typing = type_node(p, &sigs, node)?;
    let sig = &typing.signature;
    let mut s = minimal_instantiation(sig, &lv.inputs, lv.clock, lat);
    if let Some(outs) = &lv.outputs {
        for (b, l) in sig.outputs.iter().zip(outs) {
            s.insert(*b, *l);
        }
    }
    let mut levels = BTreeMap::new();
    for (d, v) in node.inputs.iter().zip(&sig.inputs).chain(node.outputs.iter().zip(&sig.outputs)) {
        levels.insert(d.name.clone(), s[v]);
    }
    for (x, t) in &typing.local_types {
        // A type that cannot be evaluated is treated as unobservable.
        let l = match eval_ground(lat, &s, t) {
            Ok(Some(l)) => l,
            _ => lat.top(),
        };
        levels.insert(x.clone(), l);
    }
    Ok(levels)
}

/// The part of `h` over variables of `xs` whose level is at most `t`.
pub fn project_history(
    h: &History,
    xs: &BTreeSet<Ident>,
    levels: &BTreeMap<Ident, Level>,
    t: Level,
    lat: &Lattice,
) -> History {
    h.iter()
        .filter(|(x, _)| xs.contains(*x) && levels.get(*x).is_some_and(|l| lat.leq(*l, t)))
        .map(|(x, s)| (x.clone(), s.clone()))
        .collect()
}

enum Trial {
    Agree,
    Skipped,
    Error,
    Diverge(Ident, usize),
}

/// Draws pairs of input histories that agree on inputs at or below `t` and
/// checks that the two runs of `f` agree on every variable at or below
/// `t`.
pub fn check_noninterference(
    p: &Program,
    f: &str,
    lat: &Lattice,
    lv: &Leveling,
    t: Level,
    cfg: &NIConfig,
) -> Result<NIReport, VerifyError> {
    let node = p.node(f).ok_or_else(|| VerifyError::UnknownNode(f.to_string()))?;
    let levels = variable_levels(p, f, lat, lv)?;
    let all: BTreeSet<Ident> = node.decls().map(|d| d.name.clone()).collect();
    let observed: Vec<Ident> = all.iter().filter(|x| lat.leq(levels[*x], t)).cloned().collect();
    let low_inputs: Vec<bool> = lv.inputs.iter().map(|l| lat.leq(*l, t)).collect();
    let low_clock = lat.leq(lv.clock, t);
    let types: Vec<ValueType> = node.inputs.iter().map(|d| d.ty).collect();
    let interp = Interpreter::new(p)?;

    let trial = |k: usize| -> Trial {
        let mut rng = trial_rng(cfg.seed, k);
        let bs1 = random_clock(&mut rng, cfg.horizon);
        let bs2 = match cfg.pairing {
            ClockPairing::Skip if !low_clock => random_clock(&mut rng, cfg.horizon),
            _ => bs1.clone(),
        };
        if bs1 != bs2 {
            return Trial::Skipped;
        }
        let mut in1 = Vec::new();
        let mut in2 = Vec::new();
        for (ty, low) in types.iter().zip(&low_inputs) {
            let s = random_stream(&mut rng, *ty, &bs1);
            in2.push(if *low { s.clone() } else { random_stream(&mut rng, *ty, &bs1) });
            in1.push(s);
        }
        let (h1, h2) = match (interp.run_on(f, &in1, &bs1), interp.run_on(f, &in2, &bs2)) {
            (Ok(h1), Ok(h2)) => (h1, h2),
            _ => return Trial::Error,
        };
        let first = observed
            .iter()
            .filter_map(|x| {
                let (s1, s2) = (&h1[x], &h2[x]);
                (0..s1.len()).find(|n| s1[*n] != s2[*n]).map(|n| (n, x))
            })
            .min();
        match first {
            Some((n, x)) => Trial::Diverge(x.clone(), n),
            None => Trial::Agree,
        }
    };
    let results: Vec<Trial> = (0..cfg.trials).into_par_iter().map(trial).collect();

    let mut report = NIReport {
        node: f.to_string(),
        level: lat.name(t).to_string(),
        inputs: input_levels(p, f, lat, lv),
        trials: cfg.trials,
        horizon: cfg.horizon,
        observed,
        skipped: 0,
        errors: 0,
        violation_count: 0,
        violations: Vec::new(),
        pass: true,
    };
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Trial::Agree => {}
            Trial::Skipped => report.skipped += 1,
            Trial::Error => report.errors += 1,
            Trial::Diverge(var, instant) => {
                report.violation_count += 1;
                if report.violations.len() < KEPT_VIOLATIONS {
                    report.violations.push(NIViolation { trial: k, seed: cfg.seed, var, instant });
                }
            }
        }
    }
    report.pass = report.violation_count == 0;
    Ok(report)
}
