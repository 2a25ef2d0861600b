use seclus::ast::{Body, Dialect, Program};
use seclus::interp::{schedule, Interpreter, Stream, CV};
use seclus::parser::{parse_nlustre, parse_program, pretty};
use seclus::typing::check_program;
use seclus::verify::{compare_forms, program_forms, TrialConfig};

const CNT_DN: &str = include_str!("../fixtures/cnt_dn.lus");
const RE_TRIG: &str = include_str!("../fixtures/re_trig.lus");

fn ints(xs: &[i64]) -> Stream {
    xs.iter().map(|&i| CV::int(i)).collect()
}

fn bools(xs: &[bool]) -> Stream {
    xs.iter().map(|&b| CV::bool(b)).collect()
}

#[test]
fn counter_counts_down_in_every_form() {
    let p = parse_program(CNT_DN).unwrap();
    let res = bools(&[true, false, false, false]);
    let n = ints(&[4, 4, 4, 4]);
    for (form, q) in program_forms(&p).unwrap() {
        let h = Interpreter::new(&q).unwrap().run("cnt_dn", &[res.clone(), n.clone()], 4).unwrap();
        assert_eq!(h["cpt"], ints(&[4, 3, 2, 1]), "{}", form);
    }
}

#[test]
fn counter_restarts_on_reset() {
    let p = parse_program(CNT_DN).unwrap();
    let res = bools(&[true, false, true, false, false]);
    let n = ints(&[3, 3, 7, 7, 7]);
    let h = Interpreter::new(&p).unwrap().run("cnt_dn", &[res, n], 5).unwrap();
    assert_eq!(h["cpt"], ints(&[3, 2, 7, 6, 5]));
}

#[test]
fn retriggered_timer_holds_while_counting() {
    let p = parse_program(RE_TRIG).unwrap();
    let i = bools(&[false, true, false, false, false]);
    let n = ints(&[2, 2, 2, 2, 2]);
    for (form, q) in program_forms(&p).unwrap() {
        let h = Interpreter::new(&q).unwrap().run("re_trig", &[i.clone(), n.clone()], 5).unwrap();
        assert_eq!(h["o"], bools(&[false, true, true, false, false]), "{}", form);
    }
}

#[test]
fn normalised_counter_is_scheduled_by_dependencies() {
    let p = parse_program(CNT_DN).unwrap();
    let q = &program_forms(&p).unwrap()[2].1;
    let node = q.node("cnt_dn").unwrap();
    let Body::NLustre(eqs) = &node.body else { panic!("not normalised") };
    let order = schedule(node).unwrap();
    let pos = |x: &str| {
        let i = eqs.iter().position(|e| e.defined().iter().any(|d| *d == x)).unwrap();
        order.iter().position(|&k| k == i).unwrap()
    };
    assert_eq!(order.len(), 4);
    assert!(pos("xinit1") < pos("v1"));
    assert!(pos("px2") < pos("v1"));
    assert!(pos("v1") < pos("cpt"));
}

#[test]
fn instantaneous_cycle_is_rejected() {
    let p = parse_program("node f(x: int) returns (y: int) var z: int; let y = z + x; z = y; tel").unwrap();
    let err = schedule(&p.nodes[0]).unwrap_err();
    assert_eq!(err.node, "f");
}

/// The fby-init form of `cnt_dn` with `v1 = if xinit1 then n else px2`
/// reduced to `v1 = px2`.
fn without_init_guard(p: &Program) -> Program {
    let q = &program_forms(p).unwrap()[2].1;
    let text = pretty(q, Dialect::NLustre).unwrap();
    assert!(text.contains("if xinit1 then n else px2"), "{}", text);
    parse_nlustre(&text.replace("if xinit1 then n else px2", "px2")).unwrap()
}

#[test]
fn dropping_the_init_guard_diverges_at_the_first_instant() {
    let p = parse_program(CNT_DN).unwrap();
    let broken = without_init_guard(&p);
    let inputs = [bools(&[false, false]), ints(&[4, 4])];
    let good = Interpreter::new(&p).unwrap().run("cnt_dn", &inputs, 2).unwrap();
    let bad = Interpreter::new(&broken).unwrap().run("cnt_dn", &inputs, 2).unwrap();
    assert_eq!(good["cpt"][0], CV::int(4));
    assert_eq!(bad["cpt"][0], CV::int(0));

    let forms = [("lustre", p.clone()), ("broken", broken)];
    let refs: Vec<(&str, &Program)> = forms.iter().map(|(n, q)| (*n, q)).collect();
    let cfg = TrialConfig { trials: 50, horizon: 10, seed: 3 };
    let r = compare_forms(&refs, "cnt_dn", &cfg).unwrap();
    assert!(!r.pass);
    let d = r.divergence.unwrap();
    assert_eq!(d.form, "broken");
    assert_eq!(d.var.as_deref(), Some("cpt"));
}

#[test]
fn signatures_survive_normalisation() {
    for src in [CNT_DN, RE_TRIG] {
        let p = parse_program(src).unwrap();
        let before = check_program(&p).unwrap();
        for (form, q) in program_forms(&p).unwrap() {
            assert_eq!(check_program(&q).unwrap(), before, "{}", form);
        }
    }
}

#[test]
fn absent_instants_stay_absent() {
    let p = parse_program(CNT_DN).unwrap();
    let res: Stream = vec![CV::bool(true), CV::Absent, CV::bool(false)];
    let n: Stream = vec![CV::int(5), CV::Absent, CV::int(5)];
    for (form, q) in program_forms(&p).unwrap() {
        let h = Interpreter::new(&q).unwrap().run("cnt_dn", &[res.clone(), n.clone()], 3).unwrap();
        assert_eq!(h["cpt"], vec![CV::int(5), CV::Absent, CV::int(4)], "{}", form);
    }
}
