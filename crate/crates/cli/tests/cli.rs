use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", rel].iter().collect();
    p.to_string_lossy().into_owned()
}

fn seclus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seclus"))
        .args(args)
        .env("SECLUS_COLOR", "0")
        .output()
        .expect("run seclus")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_prints_signatures() {
    let o = seclus(&["check", &fixture("re_trig.lus")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "cnt_dn(a1,a2) =>g (b) { g|a1|a2 <= b }\nre_trig(a1,a2) =>g (b) { g|a1|a2 <= b }\n"
    );
}

#[test]
fn check_reports_policy_violation() {
    let o = seclus(&["check", &fixture("cnt_dn.lus"), "--policy", &fixture("lowhigh.pol")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("Violation: g|a1|a2 <= b fails under g=L, a1=H, a2=L, b=L"), "{}", out);
}

#[test]
fn check_accepts_secure_policy() {
    let dir = tempfile::tempdir().unwrap();
    let pol = dir.path().join("ok.pol");
    fs::write(&pol, "base = L\nres = H\nn = L\ncpt = H\n").unwrap();
    let o = seclus(&["check", &fixture("cnt_dn.lus"), "--policy", pol.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("Secure"));
}

#[test]
fn check_on_powerset_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let pol = dir.path().join("p.pol");
    fs::write(&pol, "base = {}\nres = {0}\nn = {1}\ncpt = {0,1}\n").unwrap();
    let o = seclus(&[
        "check",
        &fixture("cnt_dn.lus"),
        "--lattice",
        "powerset:2",
        "--policy",
        pol.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn empty_file_is_fine() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.lus");
    fs::write(&f, "").unwrap();
    let o = seclus(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn syntax_error_is_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.lus");
    fs::write(&f, "node f(x: int) returns (y: int) let y = x + ; tel").unwrap();
    let o = seclus(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.lus"), "{}", stderr(&o));
}

#[test]
fn normalize_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.lus");
    let o = seclus(&["normalize", &fixture("re_trig.lus"), "-o", once.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read_to_string(&once).unwrap();
    assert!(first.contains("xinit1 :: base = true fby false;"), "{}", first);
    let o = seclus(&["normalize", once.to_str().unwrap(), "--emit", "nlustre"]);
    assert_eq!(stdout(&o), first);
}

#[test]
fn normalize_keeps_signatures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n.lus");
    seclus(&["normalize", &fixture("re_trig.lus"), "-o", out.to_str().unwrap()]);
    let before = seclus(&["check", &fixture("re_trig.lus")]);
    let after = seclus(&["check", out.to_str().unwrap()]);
    assert_eq!(stdout(&before), stdout(&after));
}

#[test]
fn interpret_counts_down() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "res,n\nT,4\nF,4\nF,4\nF,4\n").unwrap();
    let o = seclus(&["interpret", &fixture("cnt_dn.lus"), "cnt_dn", "--inputs", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "cpt\n4\n3\n2\n1\n");
}

#[test]
fn interpret_zero_steps_prints_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "res,n\nT,4\n").unwrap();
    let args =
        ["interpret", &fixture("cnt_dn.lus"), "cnt_dn", "--inputs", csv.to_str().unwrap(), "--steps", "0"];
    let o = seclus(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "cpt\n");
}

#[test]
fn interpret_trace_shows_locals() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "i,n\nT,2\nF,2\nF,2\n").unwrap();
    let args =
        ["interpret", &fixture("re_trig.lus"), "re_trig", "--inputs", csv.to_str().unwrap(), "--trace"];
    let o = seclus(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let header = out.lines().next().unwrap();
    assert!(header.starts_with("o,"), "{}", header);
    assert!(header.contains("edge"), "{}", header);
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn interpret_rejects_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "res,n\nT,four\n").unwrap();
    let o = seclus(&["interpret", &fixture("cnt_dn.lus"), "cnt_dn", "--inputs", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("four"), "{}", stderr(&o));
}

#[test]
fn interpret_rejects_too_many_steps() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "res,n\nT,4\n").unwrap();
    let args =
        ["interpret", &fixture("cnt_dn.lus"), "cnt_dn", "--inputs", csv.to_str().unwrap(), "--steps", "3"];
    assert_eq!(seclus(&args).status.code(), Some(2));
}

#[test]
fn interpret_unknown_node() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "x\n1\n").unwrap();
    let o = seclus(&["interpret", &fixture("cnt_dn.lus"), "nope", "--inputs", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn verify_all_passes_on_golden_program() {
    let args = ["verify", &fixture("re_trig.lus"), "--seed", "11", "--trials", "30", "--horizon", "20"];
    let o = seclus(&args);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("seed 11\n"));
    assert!(out.contains("PASS preservation re_trig (fby-init): equal"));
    assert!(out.contains("PASS semantics re_trig"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn verify_json_is_seeded() {
    let args = ["verify", &fixture("cnt_dn.lus"), "--json", "--seed", "5", "--trials", "20", "--jobs", "1"];
    let a = seclus(&args);
    let b = seclus(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["pass"], true);
    assert_eq!(v["signatures"]["cnt_dn"], "cnt_dn(a1,a2) =>g (b) { g|a1|a2 <= b }");
}

#[test]
fn verify_finds_leak() {
    let args = [
        "verify",
        &fixture("leaky/explicit.lus"),
        "--what",
        "ni",
        "--policy",
        &fixture("leaky/explicit.pol"),
        "--seed",
        "2",
        "--trials",
        "200",
    ];
    let o = seclus(&args);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("FAIL non-interference leak"));
}

#[test]
fn verify_skip_pairing_runs() {
    let args = [
        "verify",
        &fixture("cnt_dn.lus"),
        "--what",
        "ni",
        "--clock-pairing",
        "skip",
        "--seed",
        "4",
        "--trials",
        "50",
    ];
    let o = seclus(&args);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn verify_prints_fresh_seed() {
    let args = ["verify", &fixture("cnt_dn.lus"), "--what", "semantics", "--trials", "5"];
    let o = seclus(&args);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.strip_prefix("seed ").is_some_and(|s| s.parse::<u64>().is_ok()), "{}", first);
}

#[test]
fn verify_unknown_node() {
    let o = seclus(&["verify", &fixture("cnt_dn.lus"), "--what", "ni", "--node", "nope", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_with_lattice_file() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("diamond.lat");
    fs::write(&lat, "Pub < A < Sec\nPub < B < Sec\n").unwrap();
    let pol = dir.path().join("d.pol");
    fs::write(&pol, "base = Pub\nres = A\nn = B\ncpt = A\n").unwrap();
    let args = [
        "check",
        &fixture("cnt_dn.lus"),
        "--lattice",
        lat.to_str().unwrap(),
        "--policy",
        pol.to_str().unwrap(),
    ];
    let o = seclus(&args);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("a1=A, a2=B, b=A"), "{}", stdout(&o));
}
