use std::collections::BTreeMap;
use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use seclus::ast::{validate, Dialect, Ident, Program};
use seclus::interp::{read_csv, write_csv, Interpreter, Stream, CV};
use seclus::normalise::{fby_init, normalize_program};
use seclus::parser::{parse_program, pretty};
use seclus::sectype::{Lattice, Level, TVar};
use seclus::typing::{check_policy, check_program, NodeSignature, Policy, PolicyVerdict};
use seclus::verify::{
    check_noninterference, check_preservation, differential_semantics, roots, ClockPairing, Leveling,
    NIConfig, Report, TrialConfig,
};

#[derive(Parser)]
#[command(name = "seclus", version, about = "Security types, normalisation and stream semantics for Lustre")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every node's security signature, and check a policy against them.
    Check {
        file: PathBuf,
        /// Levels for node interfaces: `name = LEVEL` or `node.name = LEVEL`.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// `2point`, `powerset:N` or a lattice file.
        #[arg(long, default_value = "2point")]
        lattice: String,
    },
    /// Normalise a program to NLustre.
    Normalize {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::FbyInit)]
        emit: Emit,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a node on input streams read from CSV and print its outputs as CSV.
    Interpret {
        file: PathBuf,
        node: String,
        /// CSV with one column per input; `.` marks an absent value.
        #[arg(long)]
        inputs: PathBuf,
        /// Number of instants to run; defaults to the number of rows.
        #[arg(long)]
        steps: Option<usize>,
        /// Also print local variables.
        #[arg(long)]
        trace: bool,
    },
    /// Check signature preservation, semantic preservation and non-interference.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = What::All)]
        what: What,
        #[arg(long)]
        json: bool,
        /// Seed for random trials; a fresh one is drawn and printed if absent.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for trials.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "2point")]
        lattice: String,
        /// Interface levels for non-interference; without one, every
        /// assignment of bottom and top to the inputs of each root node is tried.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Restrict non-interference to this node.
        #[arg(long)]
        node: Option<String>,
        /// Trials per check; defaults to 100 for semantics and 1000 for non-interference.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 50)]
        horizon: usize,
        #[arg(long, default_value = "strict")]
        clock_pairing: ClockPairing,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Nlustre,
    FbyInit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Preservation,
    Semantics,
    Ni,
    All,
}

struct Style {
    color: bool,
}

impl Style {
    fn detect() -> Style {
        let disabled = std::env::var("SECLUS_COLOR").is_ok_and(|v| v == "0");
        Style { color: !disabled && io::stdout().is_terminal() }
    }

    fn verdict(&self, ok: bool, text: &str) -> String {
        match (self.color, ok) {
            (false, _) => text.to_string(),
            (true, true) => format!("\x1b[32m{}\x1b[0m", text),
            (true, false) => format!("\x1b[31m{}\x1b[0m", text),
        }
    }
}

fn load(path: &Path) -> Result<Program> {
    let src = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let p = parse_program(&src).map_err(|e| anyhow!("{}:{}", path.display(), e))?;
    let diags = validate(&p);
    if !diags.is_empty() {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}: {}", path.display(), d)).collect();
        bail!("{}", lines.join("\n"));
    }
    Ok(p)
}

fn lattice(arg: &str) -> Result<Lattice> {
    if arg == "2point" {
        return Ok(Lattice::two_point());
    }
    if let Some(n) = arg.strip_prefix("powerset:") {
        let n: usize = n.parse().with_context(|| format!("bad powerset size in {}", arg))?;
        return Ok(Lattice::powerset(n)?);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("cannot read lattice file {}", arg))?;
    Ok(Lattice::parse(&text)?)
}

fn policy(path: &Path) -> Result<Policy> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(Policy::parse(&text)?)
}

fn render_violation(sig: &NodeSignature, v: &PolicyVerdict, lat: &Lattice) -> String {
    match v {
        PolicyVerdict::Secure => String::new(),
        PolicyVerdict::Violation { constraint, instantiation } => {
            let name = |t: &TVar| sig.var_name(t);
            let s: Vec<String> =
                instantiation.iter().map(|(t, l)| format!("{}={}", sig.var_name(t), lat.name(*l))).collect();
            format!("{} fails under {}", constraint.render(&name, "|"), s.join(", "))
        }
    }
}

fn cmd_check(file: &Path, policy_path: Option<&Path>, lat: &str, style: &Style) -> Result<bool> {
    let p = load(file)?;
    let sigs = check_program(&p)?;
    let pol = policy_path.map(policy).transpose()?;
    let lat = lattice(lat)?;
    let mut ok = true;
    let mut out = io::stdout().lock();
    for n in &p.nodes {
        let sig = &sigs[&n.name];
        writeln!(out, "{}", sig)?;
        let Some(pol) = &pol else { continue };
        let Some(levels) = pol.levels_for(sig, &lat)? else { continue };
        let v = check_policy(sig, &levels, &lat)?;
        if v.is_secure() {
            writeln!(out, "  {}", style.verdict(true, "Secure"))?;
        } else {
            ok = false;
            writeln!(out, "  {}: {}", style.verdict(false, "Violation"), render_violation(sig, &v, &lat))?;
        }
    }
    Ok(ok)
}

fn cmd_normalize(file: &Path, emit: Emit, output: Option<&Path>) -> Result<bool> {
    let p = load(file)?;
    let nl = normalize_program(&p)?;
    let q = match emit {
        Emit::Nlustre => nl,
        Emit::FbyInit => fby_init(&nl),
    };
    let mut text = pretty(&q, Dialect::NLustre)?;
    if !text.is_empty() {
        text.push('\n');
    }
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(true)
}

fn cmd_interpret(file: &Path, f: &str, inputs: &Path, steps: Option<usize>, trace: bool) -> Result<bool> {
    let p = load(file)?;
    let node = p.node(f).ok_or_else(|| anyhow!("unknown node {}", f))?;
    let csv = fs::File::open(inputs).with_context(|| format!("cannot read {}", inputs.display()))?;
    let (names, cols) = read_csv(csv).with_context(|| format!("in {}", inputs.display()))?;
    let mut streams: Vec<Stream> = Vec::new();
    for d in &node.inputs {
        let i = names
            .iter()
            .position(|x| *x == d.name)
            .ok_or_else(|| anyhow!("{} has no column for input {}", inputs.display(), d.name))?;
        let col = &cols[i];
        if let Some(v) = col.iter().find_map(|v| match v {
            CV::Present(v) if v.value_type() != d.ty => Some(v),
            _ => None,
        }) {
            bail!("column {} holds {}, expected a {}", d.name, v, d.ty);
        }
        streams.push(col.clone());
    }
    if let Some(extra) = names.iter().find(|x| node.inputs.iter().all(|d| d.name != **x)) {
        bail!("{} has a column {} that is not an input of {}", inputs.display(), extra, f);
    }
    let rows = cols.first().map_or(0, Vec::len);
    let steps = steps.unwrap_or(rows);
    let h = Interpreter::new(&p)?.run(f, &streams, steps)?;
    let shown: Vec<Ident> = node
        .outputs
        .iter()
        .chain(if trace { node.locals.iter() } else { [].iter() })
        .map(|d| d.name.clone())
        .collect();
    let columns: Vec<&Stream> = shown.iter().map(|x| &h[x]).collect();
    write_csv(io::stdout().lock(), &shown, &columns, steps)?;
    Ok(true)
}

/// Every assignment of bottom and top to `n` inputs, at most 16 of them.
fn extreme_levelings(n: usize, lat: &Lattice) -> Vec<Vec<Level>> {
    let n = n.min(4);
    (0..1usize << n)
        .map(|m| (0..n).map(|i| if m & (1 << i) != 0 { lat.top() } else { lat.bottom() }).collect())
        .collect()
}

struct VerifyArgs<'a> {
    what: What,
    seed: u64,
    lattice: &'a str,
    policy: Option<&'a Path>,
    node: Option<&'a str>,
    trials: Option<usize>,
    horizon: usize,
    pairing: ClockPairing,
}

fn run_verify(file: &Path, a: &VerifyArgs) -> Result<Report> {
    let p = load(file)?;
    let sigs = check_program(&p)?;
    if let Some(f) = a.node {
        if p.node(f).is_none() {
            bail!("unknown node {}", f);
        }
    }
    let mut report = Report {
        signatures: sigs.iter().map(|(n, s)| (n.clone(), s.render())).collect(),
        ..Report::default()
    };
    let wants = |w: What| a.what == w || a.what == What::All;
    if wants(What::Preservation) {
        report.preservation = check_preservation(&p)?;
    }
    if wants(What::Semantics) {
        let cfg = TrialConfig { trials: a.trials.unwrap_or(100), horizon: a.horizon, seed: a.seed };
        report.semantics = differential_semantics(&p, &cfg)?;
    }
    if wants(What::Ni) {
        let lat = lattice(a.lattice)?;
        let cfg = NIConfig {
            trials: a.trials.unwrap_or(1000),
            horizon: a.horizon,
            seed: a.seed,
            pairing: a.pairing,
        };
        let mut subjects: Vec<(Ident, Leveling)> = Vec::new();
        match a.policy {
            Some(path) => {
                let pol = policy(path)?;
                for n in &p.nodes {
                    if a.node.is_some_and(|f| f != n.name) {
                        continue;
                    }
                    if let Some(levels) = pol.levels_for(&sigs[&n.name], &lat)? {
                        subjects.push((n.name.clone(), Leveling::from_names(&p, &n.name, &levels, &lat)));
                    }
                }
                if subjects.is_empty() {
                    bail!("policy {} gives levels to no node", path.display());
                }
            }
            None => {
                let nodes = match a.node {
                    Some(f) => vec![p.node(f).expect("checked above")],
                    None => roots(&p),
                };
                for n in nodes {
                    for inputs in extreme_levelings(n.inputs.len(), &lat) {
                        if inputs.len() != n.inputs.len() {
                            continue;
                        }
                        let lv = Leveling { inputs, clock: lat.bottom(), outputs: None };
                        subjects.push((n.name.clone(), lv));
                    }
                }
            }
        }
        for (f, lv) in &subjects {
            for t in lat.elements() {
                report.noninterference.push(check_noninterference(&p, f, &lat, lv, t, &cfg)?);
            }
        }
    }
    Ok(report)
}

fn print_report(r: &Report, style: &Style) -> Result<()> {
    let mut out = io::stdout().lock();
    let mark = |ok: bool| style.verdict(ok, if ok { "PASS" } else { "FAIL" });
    for v in &r.preservation {
        let rel = if v.equal {
            "equal"
        } else if v.implies {
            "implied"
        } else {
            "not implied"
        };
        writeln!(out, "{} preservation {} ({}): {}", mark(v.implies), v.node, v.form, rel)?;
        if !v.equal {
            writeln!(out, "    before: {}\n    after:  {}", v.before, v.after)?;
        }
        if let Some(w) = &v.witness {
            writeln!(out, "    witness: {}", w)?;
        }
    }
    for d in &r.semantics {
        writeln!(out, "{} semantics {}: {} trials, horizon {}", mark(d.pass), d.node, d.trials, d.horizon)?;
        if let Some(x) = &d.divergence {
            let at = match (&x.var, x.instant) {
                (Some(v), Some(n)) => format!("{} at instant {}", v, n),
                _ => "run outcome".to_string(),
            };
            writeln!(out, "    trial {}: {} differs in {}: {}", x.trial, x.form, at, x.detail)?;
        }
    }
    for n in &r.noninterference {
        writeln!(
            out,
            "{} non-interference {} [{}] at {}: {} trials, {} violations, {} skipped, {} errors, observing {}",
            mark(n.pass),
            n.node,
            n.inputs.iter().map(|(x, l)| format!("{}={}", x, l)).collect::<Vec<_>>().join(" "),
            n.level,
            n.trials,
            n.violation_count,
            n.skipped,
            n.errors,
            if n.observed.is_empty() { "nothing".to_string() } else { n.observed.join(",") }
        )?;
        for v in &n.violations {
            writeln!(out, "    trial {}: {} differs at instant {}", v.trial, v.var, v.instant)?;
        }
    }
    Ok(())
}

fn cmd_verify(file: &Path, a: &VerifyArgs, json: bool, style: &Style) -> Result<bool> {
    let report = run_verify(file, a)?;
    if json {
        let mut value = serde_json::to_value(&report)?;
        let obj = value.as_object_mut().expect("report is an object");
        obj.insert("seed".into(), a.seed.into());
        obj.insert("pass".into(), report.pass().into());
        let ordered: BTreeMap<_, _> = obj.iter().collect();
        println!("{}", serde_json::to_string_pretty(&ordered)?);
    } else {
        print_report(&report, style)?;
    }
    Ok(report.pass())
}

fn run(cli: Cli) -> Result<bool> {
    let style = Style::detect();
    match cli.command {
        Command::Check { file, policy, lattice } => cmd_check(&file, policy.as_deref(), &lattice, &style),
        Command::Normalize { file, emit, output } => cmd_normalize(&file, emit, output.as_deref()),
        Command::Interpret { file, node, inputs, steps, trace } => {
            cmd_interpret(&file, &node, &inputs, steps, trace)
        }
        Command::Verify {
            file,
            what,
            json,
            seed,
            jobs,
            lattice,
            policy,
            node,
            trials,
            horizon,
            clock_pairing,
        } => {
            if let Some(k) = jobs {
                rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
            }
            let seed = seed.unwrap_or_else(rand::random);
            if !json {
                println!("seed {}", seed);
            }
            let args = VerifyArgs {
                what,
                seed,
                lattice: &lattice,
                policy: policy.as_deref(),
                node: node.as_deref(),
                trials,
                horizon,
                pairing: clock_pairing,
            };
            cmd_verify(&file, &args, json, &style)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
