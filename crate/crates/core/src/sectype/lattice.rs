//! Finite security lattices.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(pub usize);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice has no elements")]
    Empty,
    #[error("unknown lattice element {0}")]
    UnknownElement(String),
    #[error("element {0} is listed twice")]
    DuplicateElement(String),
    #[error("order is not antisymmetric: {0} and {1} are below each other")]
    NotAntisymmetric(String, String),
    #[error("{0} and {1} have no least upper bound")]
    NoJoin(String, String),
    #[error("no bottom element")]
    NoBottom,
    #[error("line {0}: cannot read {1:?}")]
    Syntax(usize, String),
    #[error("powerset lattices are limited to 8 atoms, got {0}")]
    TooLarge(usize),
}

/// A finite lattice given by its element names and order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl Lattice {
    /// Builds a lattice from element names and an order relation, checking
    /// that it is a partial order with a bottom and all binary joins.
    pub fn from_order(names: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Lattice, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(LatticeError::NotAntisymmetric(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut join = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let uppers: Vec<usize> = (0..n).filter(|&k| leq[i][k] && leq[j][k]).collect();
                let least = uppers.iter().copied().find(|&k| uppers.iter().all(|&u| leq[k][u]));
                match least {
                    Some(k) => join[i][j] = k,
                    None => return Err(LatticeError::NoJoin(names[i].clone(), names[j].clone())),
                }
            }
        }
        let bottom = (0..n).find(|&b| (0..n).all(|k| leq[b][k])).ok_or(LatticeError::NoBottom)?;
        let top = (0..n).fold(bottom, |acc, k| join[acc][k]);
        Ok(Lattice { names, leq, join, bottom, top })
    }

    /// Builds a lattice from elements and covering pairs `(lower, upper)`;
    /// the order is their reflexive-transitive closure.
    pub fn from_covers(names: Vec<String>, covers: &[(String, String)]) -> Result<Lattice, LatticeError> {
        let n = names.len();
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(LatticeError::DuplicateElement(a.clone()));
            }
        }
        let index = |s: &String| {
            names.iter().position(|x| x == s).ok_or_else(|| LatticeError::UnknownElement(s.clone()))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in covers {
            let (i, j) = (index(a)?, index(b)?);
            leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        Lattice::from_order(names, leq)
    }

    /// The lattice `L ⊑ H`.
    pub fn two_point() -> Lattice {
        Lattice::from_covers(vec!["L".into(), "H".into()], &[("L".into(), "H".into())]).unwrap()
    }

    /// Subsets of `{0, …, n-1}` ordered by inclusion. Element `i` is the set
    /// whose members are the bits of `i`.
    pub fn powerset(n: usize) -> Result<Lattice, LatticeError> {
        if n > 8 {
            return Err(LatticeError::TooLarge(n));
        }
        let size = 1usize << n;
        let names = (0..size)
            .map(|m| {
                let members: Vec<String> =
                    (0..n).filter(|b| m & (1 << b) != 0).map(|b| b.to_string()).collect();
                format!("{{{}}}", members.join(","))
            })
            .collect();
        let leq = (0..size).map(|a| (0..size).map(|b| a & b == a).collect()).collect();
        Lattice::from_order(names, leq)
    }

    /// Reads a lattice description: each line is an element name, or a
    /// covering pair `a < b` (also `a <= b`). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Lattice, LatticeError> {
        let mut names: Vec<String> = Vec::new();
        let mut covers = Vec::new();
        let add = |names: &mut Vec<String>, s: &str| {
            if !names.iter().any(|x| x == s) {
                names.push(s.to_string());
            }
        };
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = if line.contains("<=") {
                line.split("<=").map(str::trim).collect()
            } else {
                line.split('<').map(str::trim).collect()
            };
            let valid = |s: &str| !s.is_empty() && !s.contains(char::is_whitespace);
            if !parts.iter().all(|p| valid(p)) {
                return Err(LatticeError::Syntax(no + 1, line.to_string()));
            }
            for p in &parts {
                add(&mut names, p);
            }
            for w in parts.windows(2) {
                covers.push((w[0].to_string(), w[1].to_string()));
            }
        }
        Lattice::from_covers(names, &covers)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Level> {
        (0..self.names.len()).map(Level)
    }

    pub fn bottom(&self) -> Level {
        Level(self.bottom)
    }

    pub fn top(&self) -> Level {
        Level(self.top)
    }

    pub fn leq(&self, a: Level, b: Level) -> bool {
        self.leq[a.0][b.0]
    }

    pub fn join(&self, a: Level, b: Level) -> Level {
        Level(self.join[a.0][b.0])
    }

    pub fn name(&self, l: Level) -> &str {
        &self.names[l.0]
    }

    pub fn by_name(&self, s: &str) -> Option<Level> {
        self.names.iter().position(|x| x == s).map(Level)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(l: &Lattice) {
        for a in l.elements() {
            assert!(l.leq(l.bottom(), a));
            assert!(l.leq(a, l.top()));
            for b in l.elements() {
                let j = l.join(a, b);
                assert!(l.leq(a, j) && l.leq(b, j));
                for c in l.elements() {
                    if l.leq(a, c) && l.leq(b, c) {
                        assert!(l.leq(j, c));
                    }
                }
            }
        }
    }

    #[test]
    fn builtins_satisfy_lattice_axioms() {
        check_axioms(&Lattice::two_point());
        for n in 0..=4 {
            check_axioms(&Lattice::powerset(n).unwrap());
        }
    }

    #[test]
    fn two_point_order() {
        let l = Lattice::two_point();
        let (lo, hi) = (l.by_name("L").unwrap(), l.by_name("H").unwrap());
        assert!(l.leq(lo, hi) && !l.leq(hi, lo));
        assert_eq!(l.join(lo, hi), hi);
        assert_eq!(l.bottom(), lo);
    }

    #[test]
    fn powerset_names() {
        let l = Lattice::powerset(2).unwrap();
        let names: Vec<&str> = l.elements().map(|e| l.name(e)).collect();
        assert_eq!(names, vec!["{}", "{0}", "{1}", "{0,1}"]);
    }

    #[test]
    fn diamond_from_text() {
        let l = Lattice::parse("# diamond\nbot < left < top\nbot < right < top\n").unwrap();
        check_axioms(&l);
        let (a, b) = (l.by_name("left").unwrap(), l.by_name("right").unwrap());
        assert_eq!(l.name(l.join(a, b)), "top");
    }

    #[test]
    fn non_lattices_are_rejected() {
        // Two incomparable maxima: no join.
        assert!(matches!(Lattice::parse("b < x\nb < y\n"), Err(LatticeError::NoJoin(..))));
        assert!(matches!(Lattice::parse("a < b\nb < a\n"), Err(LatticeError::NotAntisymmetric(..))));
        assert!(matches!(Lattice::parse("x\ny\n"), Err(LatticeError::NoJoin(..))));
        assert!(matches!(Lattice::parse(""), Err(LatticeError::Empty)));
    }
}
