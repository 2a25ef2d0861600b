//! Programs shipped with the crate: the two worked examples and a set of
//! programs with planted information leaks.

/// A program, the node to examine and, for leaky programs, a policy the
/// node violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub node: &'static str,
    pub source: &'static str,
    pub policy: Option<&'static str>,
}

macro_rules! leaky {
    ($($name:literal),* $(,)?) => {
        vec![$(Fixture {
            name: $name,
            node: "leak",
            source: include_str!(concat!("../../fixtures/leaky/", $name, ".lus")),
            policy: Some(include_str!(concat!("../../fixtures/leaky/", $name, ".pol"))),
        }),*]
    };
}

/// The down-counter and the re-triggerable timer built on it.
pub fn golden_fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "cnt_dn",
            node: "cnt_dn",
            source: include_str!("../../fixtures/cnt_dn.lus"),
            policy: None,
        },
        Fixture {
            name: "re_trig",
            node: "re_trig",
            source: include_str!("../../fixtures/re_trig.lus"),
            policy: None,
        },
    ]
}

/// Nodes leaking a high input `h` into a low output `o`, explicitly or
/// through control: conditionals, merge scrutinees and sampled clocks.
pub fn leaky_fixtures() -> Vec<Fixture> {
    leaky![
        "explicit",
        "arith",
        "delayed",
        "local",
        "branch",
        "compare",
        "merge",
        "merge_low",
        "sampled_clock",
        "counter_clock",
        "callee",
        "tuple",
        "feedback",
    ]
}
