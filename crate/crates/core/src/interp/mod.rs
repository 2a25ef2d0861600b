//! Finite-prefix stream semantics: pointwise operators on clocked streams,
//! an instant-by-instant evaluator for nodes, and a checker that replays a
//! history against every equation.

mod csv_io;
mod replay;
mod run;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::{BinOp, Clock, Ident, Literal, UnOp, ValueType};

pub use csv_io::{read_csv, write_csv, CsvError};
pub use replay::{check_history, ReplayError};
pub use run::{run_node, schedule, CausalityError, Interpreter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            Value::Int(_) => None,
        }
    }

    pub fn value_type(self) -> ValueType {
        match self {
            Value::Bool(_) => ValueType::Bool,
            Value::Int(_) => ValueType::Int,
        }
    }
}

impl From<Literal> for Value {
    fn from(l: Literal) -> Value {
        match l {
            Literal::Bool(b) => Value::Bool(b),
            Literal::Int(i) => Value::Int(i),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", b),
            Value::Int(i) => write!(f, "{}", i),
        }
    }
}

/// A value present at an instant, or absence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CV {
    Present(Value),
    Absent,
}

impl CV {
    pub fn is_present(self) -> bool {
        matches!(self, CV::Present(_))
    }

    pub fn int(i: i64) -> CV {
        CV::Present(Value::Int(i))
    }

    pub fn bool(b: bool) -> CV {
        CV::Present(Value::Bool(b))
    }
}

impl fmt::Display for CV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CV::Present(v) => write!(f, "{}", v),
            CV::Absent => f.write_str("."),
        }
    }
}

pub type Stream = Vec<CV>;
pub type History = BTreeMap<Ident, Stream>;
pub type ClockStream = Vec<bool>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("clock mismatch at instant {instant}: {context}")]
    ClockMismatch { instant: usize, context: String },
    #[error("division by zero at instant {instant}")]
    DivisionByZero { instant: usize },
    #[error("ill-typed operands at instant {instant}: {context}")]
    Type { instant: usize, context: String },
    #[error(transparent)]
    Causality(#[from] CausalityError),
    #[error("unknown node {0}")]
    UnknownNode(Ident),
    #[error("node {node} has {expected} inputs, got {found}")]
    Arity { node: Ident, expected: usize, found: usize },
    #[error("input stream of {node} is shorter than the horizon {horizon}")]
    ShortInput { node: Ident, horizon: usize },
    #[error("in node {node}: {message}")]
    Invalid { node: Ident, message: String },
}

fn mismatch(instant: usize, context: &str) -> RunError {
    RunError::ClockMismatch { instant, context: context.to_string() }
}

pub fn apply_unop(op: UnOp, v: Value, instant: usize) -> Result<Value, RunError> {
    match (op, v) {
        (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        (UnOp::Neg, Value::Int(i)) => Ok(Value::Int(i.wrapping_neg())),
        _ => Err(RunError::Type { instant, context: format!("{:?} {}", op, v) }),
    }
}

/// Wrapping 64-bit arithmetic; `div` and `mod` truncate toward zero.
pub fn apply_binop(op: BinOp, a: Value, b: Value, instant: usize) -> Result<Value, RunError> {
    use BinOp::*;
    use Value::{Bool as B, Int as I};
    let v = match (op, a, b) {
        (And, B(x), B(y)) => B(x && y),
        (Or, B(x), B(y)) => B(x || y),
        (Add, I(x), I(y)) => I(x.wrapping_add(y)),
        (Sub, I(x), I(y)) => I(x.wrapping_sub(y)),
        (Mul, I(x), I(y)) => I(x.wrapping_mul(y)),
        (Div | Mod, I(_), I(0)) => return Err(RunError::DivisionByZero { instant }),
        (Div, I(x), I(y)) => I(x.wrapping_div(y)),
        (Mod, I(x), I(y)) => I(x.wrapping_rem(y)),
        (Eq, x, y) if x.value_type() == y.value_type() => B(x == y),
        (Ne, x, y) if x.value_type() == y.value_type() => B(x != y),
        (Lt, I(x), I(y)) => B(x < y),
        (Le, I(x), I(y)) => B(x <= y),
        (Gt, I(x), I(y)) => B(x > y),
        (Ge, I(x), I(y)) => B(x >= y),
        _ => return Err(RunError::Type { instant, context: format!("{} {} {}", a, op.symbol(), b) }),
    };
    Ok(v)
}

fn check_lengths(lens: &[usize]) -> Result<usize, RunError> {
    let n = lens.first().copied().unwrap_or(0);
    match lens.iter().position(|l| *l != n) {
        None => Ok(n),
        Some(_) => Err(mismatch(n.min(*lens.iter().min().unwrap()), "streams of different lengths")),
    }
}

/// `c` where the clock is true, absent elsewhere.
pub fn sem_const(bs: &[bool], c: Value) -> Stream {
    bs.iter().map(|b| if *b { CV::Present(c) } else { CV::Absent }).collect()
}

pub fn sem_lift1(op: UnOp, xs: &[CV]) -> Result<Stream, RunError> {
    xs.iter()
        .enumerate()
        .map(|(n, x)| match x {
            CV::Present(v) => apply_unop(op, *v, n).map(CV::Present),
            CV::Absent => Ok(CV::Absent),
        })
        .collect()
}

pub fn sem_lift2(op: BinOp, xs: &[CV], ys: &[CV]) -> Result<Stream, RunError> {
    check_lengths(&[xs.len(), ys.len()])?;
    xs.iter()
        .zip(ys)
        .enumerate()
        .map(|(n, pair)| match pair {
            (CV::Present(a), CV::Present(b)) => apply_binop(op, *a, *b, n).map(CV::Present),
            (CV::Absent, CV::Absent) => Ok(CV::Absent),
            _ => Err(mismatch(n, op.symbol())),
        })
        .collect()
}

/// One instant of `e when (x = k)`.
pub fn when_at(k: bool, x: CV, e: CV, n: usize) -> Result<CV, RunError> {
    match (x, e) {
        (CV::Present(Value::Bool(b)), CV::Present(v)) => Ok(if b == k { CV::Present(v) } else { CV::Absent }),
        (CV::Absent, CV::Absent) => Ok(CV::Absent),
        _ => Err(mismatch(n, "when")),
    }
}

pub fn sem_when(k: bool, xs: &[CV], es: &[CV]) -> Result<Stream, RunError> {
    check_lengths(&[xs.len(), es.len()])?;
    xs.iter().zip(es).enumerate().map(|(n, (x, e))| when_at(k, *x, *e, n)).collect()
}

/// One instant of `merge x t f`.
pub fn merge_at(x: CV, t: CV, f: CV, n: usize) -> Result<CV, RunError> {
    match (x, t, f) {
        (CV::Present(Value::Bool(true)), CV::Present(v), CV::Absent) => Ok(CV::Present(v)),
        (CV::Present(Value::Bool(false)), CV::Absent, CV::Present(v)) => Ok(CV::Present(v)),
        (CV::Absent, CV::Absent, CV::Absent) => Ok(CV::Absent),
        _ => Err(mismatch(n, "merge")),
    }
}

pub fn sem_merge(xs: &[CV], ts: &[CV], fs: &[CV]) -> Result<Stream, RunError> {
    check_lengths(&[xs.len(), ts.len(), fs.len()])?;
    (0..xs.len()).map(|n| merge_at(xs[n], ts[n], fs[n], n)).collect()
}

/// One instant of `if e then t else f`.
pub fn ite_at(e: CV, t: CV, f: CV, n: usize) -> Result<CV, RunError> {
    match (e, t, f) {
        (CV::Present(Value::Bool(b)), CV::Present(tv), CV::Present(fv)) => {
            Ok(CV::Present(if b { tv } else { fv }))
        }
        (CV::Absent, CV::Absent, CV::Absent) => Ok(CV::Absent),
        _ => Err(mismatch(n, "if")),
    }
}

pub fn sem_ite(es: &[CV], ts: &[CV], fs: &[CV]) -> Result<Stream, RunError> {
    check_lengths(&[es.len(), ts.len(), fs.len()])?;
    (0..es.len()).map(|n| ite_at(es[n], ts[n], fs[n], n)).collect()
}

/// Lustre `fby`: the first present value of `xs`, then the values of `ys`
/// delayed by one present instant.
pub fn sem_fby_l(xs: &[CV], ys: &[CV]) -> Result<Stream, RunError> {
    check_lengths(&[xs.len(), ys.len()])?;
    let mut stored: Option<Value> = None;
    let mut out = Vec::with_capacity(xs.len());
    for (n, (x, y)) in xs.iter().zip(ys).enumerate() {
        match (x, y) {
            (CV::Present(x), CV::Present(y)) => {
                out.push(CV::Present(stored.unwrap_or(*x)));
                stored = Some(*y);
            }
            (CV::Absent, CV::Absent) => out.push(CV::Absent),
            _ => return Err(mismatch(n, "fby")),
        }
    }
    Ok(out)
}

/// NLustre `fby`: a register initialised with `c`.
pub fn sem_fby_nl(c: Value, vs: &[CV]) -> Stream {
    let mut stored = c;
    vs.iter()
        .map(|v| match v {
            CV::Present(v) => {
                let out = CV::Present(stored);
                stored = *v;
                out
            }
            CV::Absent => CV::Absent,
        })
        .collect()
}

/// The boolean stream of a clock.
pub fn sem_clock(h: &History, bs: &[bool], ck: &Clock) -> Result<ClockStream, RunError> {
    match ck {
        Clock::Base => Ok(bs.to_vec()),
        Clock::On(parent, x, k) => {
            let outer = sem_clock(h, bs, parent)?;
            let xs = h.get(x).ok_or_else(|| mismatch(0, &format!("clock variable {} has no stream", x)))?;
            check_lengths(&[outer.len(), xs.len()])?;
            outer
                .iter()
                .zip(xs)
                .enumerate()
                .map(|(n, (b, x))| match (b, x) {
                    (true, CV::Present(Value::Bool(v))) => Ok(v == k),
                    (false, CV::Absent) => Ok(false),
                    _ => Err(mismatch(n, &format!("clock on {}", x))),
                })
                .collect()
        }
    }
}

/// The clock on which all of `vs` are present; their presence must agree.
pub fn base_of(vs: &[Stream]) -> Result<ClockStream, RunError> {
    let Some(first) = vs.first() else { return Ok(Vec::new()) };
    check_lengths(&vs.iter().map(Vec::len).collect::<Vec<_>>())?;
    let bs: ClockStream = first.iter().map(|v| v.is_present()).collect();
    for v in &vs[1..] {
        if let Some(n) = v.iter().zip(&bs).position(|(v, b)| v.is_present() != *b) {
            return Err(mismatch(n, "inputs with different clocks"));
        }
    }
    Ok(bs)
}

/// Whether every stream is absent wherever the clock is false.
pub fn respects_clock(h: &History, bs: &[bool]) -> bool {
    h.values().all(|s| s.iter().zip(bs).all(|(v, b)| *b || !v.is_present()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: CV = CV::Absent;

    fn i(v: i64) -> CV {
        CV::int(v)
    }

    fn b(v: bool) -> CV {
        CV::bool(v)
    }

    #[test]
    fn constants_follow_the_clock() {
        assert_eq!(sem_const(&[true, false, true], Value::Int(5)), vec![i(5), A, i(5)]);
        assert_eq!(sem_const(&[false, false], Value::Int(1)), vec![A, A]);
        assert_eq!(sem_const(&[true], Value::Bool(true)), vec![b(true)]);
    }

    #[test]
    fn lifted_operators() {
        assert_eq!(sem_lift1(UnOp::Not, &[b(true), A]).unwrap(), vec![b(false), A]);
        assert_eq!(sem_lift2(BinOp::Add, &[i(1)], &[i(2)]).unwrap(), vec![i(3)]);
        assert!(matches!(sem_lift2(BinOp::Add, &[i(1)], &[A]), Err(RunError::ClockMismatch { .. })));
        assert_eq!(sem_lift2(BinOp::Add, &[i(i64::MAX)], &[i(1)]).unwrap(), vec![i(i64::MIN)]);
        assert_eq!(sem_lift2(BinOp::Div, &[i(1)], &[i(0)]), Err(RunError::DivisionByZero { instant: 0 }));
        assert_eq!(sem_lift2(BinOp::Mod, &[i(-7)], &[i(2)]).unwrap(), vec![i(-1)]);
    }

    #[test]
    fn sampling() {
        let xs = [b(true), b(false), A];
        assert_eq!(sem_when(true, &xs, &[i(1), i(2), A]).unwrap(), vec![i(1), A, A]);
        assert_eq!(sem_when(true, &[A, A], &[A, A]).unwrap(), vec![A, A]);
        assert!(sem_when(true, &[A], &[i(1)]).is_err());
    }

    #[test]
    fn merging() {
        let got = sem_merge(&[b(true), b(false)], &[i(1), A], &[A, i(2)]).unwrap();
        assert_eq!(got, vec![i(1), i(2)]);
        assert_eq!(sem_merge(&[A], &[A], &[A]).unwrap(), vec![A]);
        assert!(sem_merge(&[b(true)], &[i(1)], &[i(2)]).is_err());
    }

    #[test]
    fn conditionals() {
        let got = sem_ite(&[b(true), b(false)], &[i(1), i(1)], &[i(2), i(2)]).unwrap();
        assert_eq!(got, vec![i(1), i(2)]);
        assert_eq!(sem_ite(&[A], &[A], &[A]).unwrap(), vec![A]);
        assert!(sem_ite(&[b(true)], &[A], &[i(2)]).is_err());
    }

    #[test]
    fn lustre_fby() {
        assert_eq!(sem_fby_l(&[i(1), i(2), i(3)], &[i(10), i(20), i(30)]).unwrap(), vec![i(1), i(10), i(20)]);
        assert_eq!(sem_fby_l(&[A, i(1)], &[A, i(9)]).unwrap(), vec![A, i(1)]);
        assert_eq!(sem_fby_l(&[A, A], &[A, A]).unwrap(), vec![A, A]);
    }

    #[test]
    fn nlustre_fby() {
        assert_eq!(sem_fby_nl(Value::Int(0), &[i(1), i(2), i(3)]), vec![i(0), i(1), i(2)]);
        assert_eq!(sem_fby_nl(Value::Int(0), &[i(1), A, i(2)]), vec![i(0), A, i(1)]);
        assert_eq!(sem_fby_nl(Value::Int(0), &[A, A]), vec![A, A]);
    }

    #[test]
    fn clocks_of_histories() {
        let h: History = [("x".to_string(), vec![b(true), b(false)])].into();
        assert_eq!(sem_clock(&h, &[true, true], &Clock::Base).unwrap(), vec![true, true]);
        assert_eq!(sem_clock(&h, &[true, true], &Clock::Base.on("x", true)).unwrap(), vec![true, false]);
        let absent: History = [("x".to_string(), vec![A])].into();
        assert!(sem_clock(&absent, &[true], &Clock::Base.on("x", true)).is_err());
    }

    #[test]
    fn base_clock_of_inputs() {
        assert_eq!(base_of(&[vec![i(1), A, i(2)]]).unwrap(), vec![true, false, true]);
        assert_eq!(base_of(&[vec![], vec![]]).unwrap(), Vec::<bool>::new());
        assert!(base_of(&[vec![i(1), A], vec![i(1), i(2)]]).is_err());
    }

    #[test]
    fn clock_respect() {
        let h: History = [("x".to_string(), vec![i(1), A])].into();
        assert!(respects_clock(&h, &[true, false]));
        let h: History = [("x".to_string(), vec![A, i(1)])].into();
        assert!(!respects_clock(&h, &[true, false]));
        assert!(respects_clock(&History::new(), &[true]));
    }

    #[test]
    fn fby_variants_agree_on_constant_heads() {
        let bs = [true, false, true, true];
        let vs = vec![i(4), A, i(6), i(7)];
        assert_eq!(sem_fby_l(&sem_const(&bs, Value::Int(0)), &vs).unwrap(), sem_fby_nl(Value::Int(0), &vs));
    }
}
