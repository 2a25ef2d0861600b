use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seclus::ast::{Dialect, Node, Program, ValueType};
use seclus::interp::{check_history, respects_clock, History, Interpreter, Stream, Value, CV};
use seclus::normalise::normalize_program;
use seclus::parser::{parse_nlustre, parse_program, pretty};
use seclus::verify::{
    check_noninterference, differential_semantics, generate_program, program_forms, roots, GenConfig,
    Leveling, NIConfig, TrialConfig,
};

fn program(seed: u64) -> Program {
    generate_program(&GenConfig::with_seed(seed))
}

fn inputs(rng: &mut ChaCha8Rng, n: &Node, horizon: usize) -> Vec<Stream> {
    let bs: Vec<bool> = (0..horizon).map(|_| rng.gen_bool(0.8)).collect();
    n.inputs
        .iter()
        .map(|d| {
            bs.iter()
                .map(|&b| match (b, d.ty) {
                    (false, _) => CV::Absent,
                    (true, ValueType::Bool) => CV::Present(Value::Bool(rng.gen())),
                    (true, ValueType::Int) => CV::Present(Value::Int(rng.gen_range(-9..=9))),
                })
                .collect()
        })
        .collect()
}

fn outputs(n: &Node, h: &History) -> Vec<Stream> {
    n.outputs.iter().map(|d| h[&d.name].clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn printing_then_parsing_is_identity(seed: u64) {
        let p = program(seed);
        let text = pretty(&p, Dialect::Lustre).unwrap();
        prop_assert_eq!(parse_program(&text).unwrap(), p.clone());
        let forms = program_forms(&p).unwrap();
        for (_, q) in &forms[1..] {
            let text = pretty(q, Dialect::NLustre).unwrap();
            prop_assert_eq!(&parse_nlustre(&text).unwrap(), q);
        }
    }

    #[test]
    fn normalising_twice_changes_nothing(seed: u64) {
        let forms = program_forms(&program(seed)).unwrap();
        let once = pretty(&forms[2].1, Dialect::NLustre).unwrap();
        let again = normalize_program(&parse_program(&once).unwrap()).unwrap();
        prop_assert_eq!(pretty(&again, Dialect::NLustre).unwrap(), once);
    }

    #[test]
    fn forms_agree_and_replay(seed: u64, horizon in 0usize..25) {
        let p = program(seed);
        let forms = program_forms(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for f in roots(&p) {
            let xs = inputs(&mut rng, f, horizon);
            let mut seen: Option<Vec<Stream>> = None;
            for (form, q) in &forms {
                let h = Interpreter::new(q).unwrap().run(&f.name, &xs, horizon).unwrap();
                prop_assert!(h.values().all(|s| s.len() == horizon));
                prop_assert!(check_history(q, &f.name, &h).is_ok(), "{} rejected on {}", form, f.name);
                let out = outputs(q.node(&f.name).unwrap(), &h);
                match &seen {
                    None => seen = Some(out),
                    Some(first) => prop_assert_eq!(first, &out, "{} differs on {}", form, f.name),
                }
            }
        }
    }

    #[test]
    fn nlustre_histories_respect_clocks(seed: u64) {
        let p = program(seed);
        let forms = program_forms(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        for f in roots(&p) {
            let xs = inputs(&mut rng, f, 20);
            let bs: Vec<bool> = (0..20).map(|n| xs.first().is_none_or(|s| s[n].is_present())).collect();
            for (_, q) in &forms[1..] {
                let h = Interpreter::new(q).unwrap().run(&f.name, &xs, 20).unwrap();
                prop_assert!(respects_clock(&h, &bs));
            }
        }
    }

    #[test]
    fn runs_extend_their_prefixes(seed: u64, cut in 0usize..30) {
        let p = program(seed);
        let interp = Interpreter::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        for f in roots(&p) {
            let xs = inputs(&mut rng, f, 30);
            let full = interp.run(&f.name, &xs, 30).unwrap();
            let short: Vec<Stream> = xs.iter().map(|s| s[..cut].to_vec()).collect();
            let part = interp.run(&f.name, &short, cut).unwrap();
            for (x, s) in &part {
                prop_assert_eq!(&full[x][..cut], &s[..]);
            }
        }
    }

    #[test]
    fn absent_inputs_give_absent_streams(seed: u64) {
        let p = program(seed);
        for (_, q) in &program_forms(&p).unwrap() {
            let interp = Interpreter::new(q).unwrap();
            for f in roots(&p).into_iter().filter(|f| !f.inputs.is_empty()) {
                let xs: Vec<Stream> = f.inputs.iter().map(|_| vec![CV::Absent; 10]).collect();
                let h = interp.run(&f.name, &xs, 10).unwrap();
                prop_assert!(h.values().flatten().all(|v| *v == CV::Absent));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_depend_only_on_the_seed(seed: u64, trial_seed: u64) {
        let p = program(seed);
        let cfg = TrialConfig { trials: 20, horizon: 15, seed: trial_seed };
        prop_assert_eq!(differential_semantics(&p, &cfg).unwrap(), differential_semantics(&p, &cfg).unwrap());
        let lat = seclus::sectype::Lattice::two_point();
        let f = roots(&p)[0];
        let lv = Leveling { inputs: vec![lat.top(); f.inputs.len()], clock: lat.bottom(), outputs: None };
        let ni = NIConfig { trials: 20, horizon: 15, seed: trial_seed, ..NIConfig::default() };
        let a = check_noninterference(&p, &f.name, &lat, &lv, lat.bottom(), &ni).unwrap();
        let b = check_noninterference(&p, &f.name, &lat, &lv, lat.bottom(), &ni).unwrap();
        prop_assert_eq!(a, b);
    }
}
