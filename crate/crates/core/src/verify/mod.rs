//! Executable checks of the type system and the normalisation passes:
//! signature preservation, semantic equivalence of the three program forms,
//! and non-interference, plus a random program generator.

mod fixtures;
mod gen;
mod ni;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ast::{Ident, Program, ValueType};
use crate::interp::{History, Interpreter, ReplayError, RunError, Stream, Value, CV};
use crate::normalise::{fby_init, normalize_program, NormError};
use crate::sectype::{implies, GroundInstantiation, Lattice};
use crate::typing::{check_program, PolicyError, TypeError};

pub use fixtures::{golden_fixtures, leaky_fixtures, Fixture};
pub use gen::{generate_program, roots, GenConfig};
pub use ni::{
    check_noninterference, project_history, variable_levels, ClockPairing, Leveling, NIConfig, NIReport,
    NIViolation,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("unknown node {0}")]
    UnknownNode(Ident),
    #[error("{0}")]
    Config(String),
}

/// The three forms of a program compared by the checks: as written, after
/// de-nesting, and after explicit `fby` initialisation.
pub fn program_forms(p: &Program) -> Result<[(&'static str, Program); 3], VerifyError> {
    let nl = normalize_program(p)?;
    let init = fby_init(&nl);
    Ok([("lustre", p.clone()), ("nlustre", nl), ("fby-init", init)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationVerdict {
    pub node: Ident,
    /// Which transformed form the signature was recomputed on.
    pub form: String,
    pub before: String,
    pub after: String,
    pub implies: bool,
    pub equal: bool,
    /// An assignment satisfying the original constraints but not the new
    /// ones, over the two-point lattice.
    pub witness: Option<String>,
}

fn render_instantiation(s: &GroundInstantiation) -> String {
    let lat = Lattice::two_point();
    s.iter().map(|(v, l)| format!("{}={}", v, lat.name(*l))).collect::<Vec<_>>().join(", ")
}

/// Compares every node's signature before and after each pass. Signature
/// variables are canonical by position, so the interfaces line up
/// without renaming.
pub fn check_preservation(p: &Program) -> Result<Vec<PreservationVerdict>, VerifyError> {
    let forms = program_forms(p)?;
    let before = check_program(p)?;
    let mut out = Vec::new();
    for (form, q) in &forms[1..] {
        let after = check_program(q)?;
        for n in &p.nodes {
            let s0 = &before[&n.name];
            let s1 = after.get(&n.name).ok_or_else(|| VerifyError::UnknownNode(n.name.clone()))?;
            let imp = implies(&s0.rho, &s1.rho, &s0.interface_vars());
            out.push(PreservationVerdict {
                node: n.name.clone(),
                form: form.to_string(),
                before: s0.render(),
                after: s1.render(),
                implies: imp.holds,
                equal: s0.render() == s1.render(),
                witness: imp.witness.as_ref().map(render_instantiation),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub horizon: usize,
    pub seed: u64,
}

impl Default for TrialConfig {
    fn default() -> TrialConfig {
        TrialConfig { trials: 100, horizon: 50, seed: 0 }
    }
}

/// Random generator for trial `t`: each trial draws from its own stream,
/// so results do not depend on how trials are scheduled.
pub(crate) fn trial_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

/// A base clock present at about five instants in six.
pub(crate) fn random_clock(rng: &mut ChaCha8Rng, horizon: usize) -> Vec<bool> {
    (0..horizon).map(|_| rng.gen_bool(0.85)).collect()
}

pub(crate) fn random_stream(rng: &mut ChaCha8Rng, ty: ValueType, bs: &[bool]) -> Stream {
    bs.iter()
        .map(|b| match (b, ty) {
            (false, _) => CV::Absent,
            (true, ValueType::Bool) => CV::Present(Value::Bool(rng.gen())),
            (true, ValueType::Int) => CV::Present(Value::Int(rng.gen_range(-20..=20))),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub trial: usize,
    pub form: String,
    pub var: Option<Ident>,
    pub instant: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialReport {
    pub node: Ident,
    pub trials: usize,
    pub horizon: usize,
    pub pass: bool,
    pub divergence: Option<Divergence>,
}

/// What a run produced, for comparison across forms: output streams, or
/// the kind and instant of the runtime error.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Outcome {
    Outputs(Vec<Stream>),
    Failed(&'static str, Option<usize>),
}

fn outcome(r: Result<History, RunError>, outputs: &[Ident]) -> Outcome {
    match r {
        Ok(h) => Outcome::Outputs(outputs.iter().map(|x| h[x].clone()).collect()),
        Err(e) => match e {
            RunError::ClockMismatch { instant, .. } => Outcome::Failed("clock mismatch", Some(instant)),
            RunError::DivisionByZero { instant } => Outcome::Failed("division by zero", Some(instant)),
            RunError::Type { instant, .. } => Outcome::Failed("type error", Some(instant)),
            RunError::Causality(_) => Outcome::Failed("causality", None),
            _ => Outcome::Failed("invalid run", None),
        },
    }
}

fn first_difference(
    outputs: &[Ident],
    a: &Outcome,
    b: &Outcome,
) -> Option<(Option<Ident>, Option<usize>, String)> {
    match (a, b) {
        (Outcome::Outputs(xs), Outcome::Outputs(ys)) => outputs
            .iter()
            .zip(xs.iter().zip(ys))
            .filter_map(|(x, (s, t))| {
                let n = (0..s.len().max(t.len())).find(|n| s.get(*n) != t.get(*n))?;
                let show = |v: Option<&CV>| v.map_or("-".to_string(), |v| v.to_string());
                Some((n, x, format!("{} vs {}", show(s.get(n)), show(t.get(n)))))
            })
            .min_by_key(|(n, x, _)| (*n, (*x).clone()))
            .map(|(n, x, d)| (Some(x.clone()), Some(n), d)),
        (a, b) if a == b => None,
        (a, b) => Some((None, None, format!("{:?} vs {:?}", a, b))),
    }
}

/// Runs node `f` in every form on the same random inputs and reports the
/// first trial whose outputs differ from those of the first form.
pub fn compare_forms(
    forms: &[(&str, &Program)],
    f: &str,
    cfg: &TrialConfig,
) -> Result<DifferentialReport, VerifyError> {
    let (_, p0) = forms.first().ok_or_else(|| VerifyError::Config("no program to run".into()))?;
    let node = p0.node(f).ok_or_else(|| VerifyError::UnknownNode(f.to_string()))?;
    let types: Vec<ValueType> = node.inputs.iter().map(|d| d.ty).collect();
    let outputs: Vec<Ident> = node.outputs.iter().map(|d| d.name.clone()).collect();
    let interps = forms.iter().map(|(_, p)| Interpreter::new(p)).collect::<Result<Vec<_>, _>>()?;

    let trial = |t: usize| -> Option<Divergence> {
        let mut rng = trial_rng(cfg.seed, t);
        let bs = random_clock(&mut rng, cfg.horizon);
        let inputs: Vec<Stream> = types.iter().map(|ty| random_stream(&mut rng, *ty, &bs)).collect();
        let runs: Vec<Outcome> =
            interps.iter().map(|i| outcome(i.run_on(f, &inputs, &bs), &outputs)).collect();
        runs.iter().enumerate().skip(1).find_map(|(k, r)| {
            first_difference(&outputs, &runs[0], r).map(|(var, instant, detail)| Divergence {
                trial: t,
                form: forms[k].0.to_string(),
                var,
                instant,
                detail,
            })
        })
    };
    let found: Vec<Option<Divergence>> = (0..cfg.trials).into_par_iter().map(trial).collect();
    let divergence = found.into_iter().flatten().next();
    Ok(DifferentialReport {
        node: f.to_string(),
        trials: cfg.trials,
        horizon: cfg.horizon,
        pass: divergence.is_none(),
        divergence,
    })
}

/// Runs every node not called by another one in the three forms of `p`.
pub fn differential_semantics(
    p: &Program,
    cfg: &TrialConfig,
) -> Result<Vec<DifferentialReport>, VerifyError> {
    let forms = program_forms(p)?;
    let refs: Vec<(&str, &Program)> = forms.iter().map(|(n, q)| (*n, q)).collect();
    roots(p).iter().map(|n| compare_forms(&refs, &n.name, cfg)).collect()
}

/// Signature, preservation, semantics and non-interference results for
/// one program.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub signatures: BTreeMap<Ident, String>,
    pub preservation: Vec<PreservationVerdict>,
    pub semantics: Vec<DifferentialReport>,
    pub noninterference: Vec<NIReport>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.preservation.iter().all(|v| v.implies)
            && self.semantics.iter().all(|d| d.pass)
            && self.noninterference.iter().all(|r| r.pass)
    }
}
