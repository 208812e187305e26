//! Raw 2CNF instances as read from DIMACS-style text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engines::twosat::{solve_2cnf, Lit, TwoCnf};
use crate::error::{Error, Result};

/// A 2CNF over propositions `p_1..p_m`, stored 0-based. Clauses keep their
/// input order and may repeat a literal (`(ℓ ∨ ℓ)`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    num_props: usize,
    clauses: Vec<(Lit, Lit)>,
}

impl CnfInstance {
    pub fn new(num_props: usize, clauses: Vec<(Lit, Lit)>) -> Result<Self> {
        for &(a, b) in &clauses {
            for l in [a, b] {
                if l.var() >= num_props {
                    return Err(Error::InvalidInstance(format!(
                        "literal over p{} but only {num_props} propositions declared",
                        l.var() + 1
                    )));
                }
            }
        }
        Ok(Self { num_props, clauses })
    }

    pub fn num_props(&self) -> usize {
        self.num_props
    }

    pub fn clauses(&self) -> &[(Lit, Lit)] {
        &self.clauses
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|&(a, b)| a.eval(assignment) || b.eval(assignment))
    }

    pub fn to_two_cnf(&self) -> TwoCnf {
        TwoCnf::new(self.num_props, self.clauses.iter().copied()).expect("indices validated")
    }

    /// Satisfying assignment via the SCC solver.
    pub fn solve(&self) -> Option<Vec<bool>> {
        solve_2cnf(&self.to_two_cnf())
    }

    /// Rewrites every `(ℓ ∨ ℓ)` as `(ℓ ∨ q) ∧ (ℓ ∨ ¬q)` with a fresh `q` per
    /// such clause; equisatisfiable, and no clause repeats a literal.
    pub fn split_repeated_literals(&self) -> CnfInstance {
        let mut num_props = self.num_props;
        let mut clauses = Vec::with_capacity(self.clauses.len());
        for &(a, b) in &self.clauses {
            if a == b {
                let q = num_props;
                num_props += 1;
                clauses.push((a, Lit::pos(q)));
                clauses.push((a, Lit::neg(q)));
            } else {
                clauses.push((a, b));
            }
        }
        CnfInstance { num_props, clauses }
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_props, self.clauses.len());
        for &(a, b) in &self.clauses {
            let _ = writeln!(out, "{} {} 0", dimacs_lit(a), dimacs_lit(b));
        }
        out
    }

    /// Parses `p cnf <props> <clauses>` followed by one clause per line: two
    /// non-zero literals and a terminating `0`. Lines starting with `c` are
    /// comments.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let no = no + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            let bad = |msg: &str| Error::Format(format!("line {no}: {msg}"));
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(bad("second header"));
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", m, n] => {
                        let m = m.parse().map_err(|_| bad("bad proposition count"))?;
                        let n = n.parse().map_err(|_| bad("bad clause count"))?;
                        header = Some((m, n));
                    }
                    _ => return Err(bad("expected `p cnf <props> <clauses>`")),
                }
                continue;
            }
            let (m, _) = header.ok_or_else(|| bad("clause before `p cnf` header"))?;
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| bad(&format!("`{t}` is not a literal"))))
                .collect::<Result<Vec<_>>>()?;
            match nums.as_slice() {
                [a, b, 0] if *a != 0 && *b != 0 => {
                    let lit = |v: i64| -> Result<Lit> {
                        let p = v.unsigned_abs() as usize;
                        if p > m {
                            return Err(bad(&format!("literal {v} exceeds declared {m} propositions")));
                        }
                        Ok(Lit::new(p - 1, v > 0))
                    };
                    clauses.push((lit(*a)?, lit(*b)?));
                }
                _ => return Err(bad("expected exactly two literals followed by 0")),
            }
        }
        let (m, n) = header.ok_or_else(|| Error::Format("missing `p cnf` header".into()))?;
        if clauses.len() != n {
            return Err(Error::Format(format!("header declares {n} clauses, found {}", clauses.len())));
        }
        CnfInstance::new(m, clauses)
    }
}

fn dimacs_lit(l: Lit) -> i64 {
    let v = l.var() as i64 + 1;
    if l.is_positive() {
        v
    } else {
        -v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let text = "c example\np cnf 3 2\n1 -2 0\n-3 3 0\n";
        let cnf = CnfInstance::parse_dimacs(text).unwrap();
        assert_eq!(cnf.num_props(), 3);
        assert_eq!(cnf.clauses(), &[(Lit::pos(0), Lit::neg(1)), (Lit::neg(2), Lit::pos(2))]);
        assert_eq!(CnfInstance::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
    }

    #[test]
    fn dimacs_errors() {
        assert!(CnfInstance::parse_dimacs("1 2 0\n").is_err());
        assert!(CnfInstance::parse_dimacs("p cnf 2 1\n1 2 3 0\n").is_err());
        assert!(CnfInstance::parse_dimacs("p cnf 2 1\n1 0\n").is_err());
        assert!(CnfInstance::parse_dimacs("p cnf 2 1\n1 5 0\n").is_err());
        assert!(CnfInstance::parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
    }

    #[test]
    fn repeated_literal_split() {
        let cnf = CnfInstance::new(1, vec![(Lit::pos(0), Lit::pos(0)), (Lit::neg(0), Lit::neg(0))]).unwrap();
        let s = cnf.split_repeated_literals();
        assert_eq!(s.num_props(), 3);
        assert_eq!(s.clauses().len(), 4);
        assert_eq!(s.solve(), None);
        assert_eq!(cnf.solve(), None);
    }
}
