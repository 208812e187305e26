//! The universal engine: reduce to 2CNF over one proposition per row, solve by
//! strongly connected components of the implication graph.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certificate::SplitCertificate;
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::{BoundFormula, Team};

use super::{EngineKind, EngineStats, Verdict};

/// A literal: proposition index plus sign, packed as `2·var + negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit(u32::try_from(var).expect("proposition index overflow") << 1)
    }

    pub fn neg(var: usize) -> Self {
        Lit(Self::pos(var).0 | 1)
    }

    pub fn new(var: usize, positive: bool) -> Self {
        if positive {
            Self::pos(var)
        } else {
            Self::neg(var)
        }
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }

    fn code(self) -> usize {
        self.0 as usize
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var()] == self.is_positive()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "¬x{}", self.var())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCnf {
    num_vars: usize,
    clauses: Vec<(Lit, Lit)>,
}

impl TwoCnf {
    /// Validates indices, drops tautologies `(ℓ ∨ ¬ℓ)` and duplicate clauses
    /// (clauses are unordered pairs).
    pub fn new(num_vars: usize, clauses: impl IntoIterator<Item = (Lit, Lit)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b) in clauses {
            for l in [a, b] {
                if l.var() >= num_vars {
                    return Err(Error::InvalidInstance(format!(
                        "literal {l} out of range for {num_vars} propositions"
                    )));
                }
            }
            if a == b.negate() {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                out.push(key);
            }
        }
        Ok(Self {
            num_vars,
            clauses: out,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[(Lit, Lit)] {
        &self.clauses
    }

    pub fn contains(&self, a: Lit, b: Lit) -> bool {
        self.clauses.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars && self.clauses.iter().all(|&(a, b)| a.eval(assignment) || b.eval(assignment))
    }
}

/// One proposition per row; `x_i` true means row `i` goes right. A pair
/// violating the left atom forbids both staying left: `(x_i ∨ x_j)`; a pair
/// violating the right atom forbids both going right: `(¬x_i ∨ ¬x_j)`.
pub fn reduce_to_2cnf(team: &Team, f: &DisjunctionFormula) -> Result<TwoCnf> {
    Ok(reduce_counting(team, f)?.0)
}

fn reduce_counting(team: &Team, f: &DisjunctionFormula) -> Result<(TwoCnf, usize)> {
    let bound = BoundFormula::bind(team, f).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    let n = team.len();
    let mut clauses = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if bound.left.violated_by(team, i, j) {
                clauses.push((Lit::pos(i), Lit::pos(j)));
            }
            if bound.right.violated_by(team, i, j) {
                clauses.push((Lit::neg(i), Lit::neg(j)));
            }
        }
    }
    // Pairs are distinct and never tautological, so no normalisation needed.
    let pairs = n * n.saturating_sub(1) / 2;
    Ok((TwoCnf { num_vars: n, clauses }, pairs))
}

/// Implication-graph SCC decision (Tarjan, iterative). Deterministic: the
/// same input always yields the same assignment.
pub fn solve_2cnf(cnf: &TwoCnf) -> Option<Vec<bool>> {
    let nodes = 2 * cnf.num_vars;
    // CSR adjacency: ¬a → b and ¬b → a for every clause (a ∨ b).
    let mut start = vec![0usize; nodes + 1];
    for &(a, b) in &cnf.clauses {
        start[a.negate().code() + 1] += 1;
        start[b.negate().code() + 1] += 1;
    }
    for v in 0..nodes {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut adj = vec![0u32; start[nodes]];
    for &(a, b) in &cnf.clauses {
        let (na, nb) = (a.negate().code(), b.negate().code());
        adj[fill[na]] = b.0;
        fill[na] += 1;
        adj[fill[nb]] = a.0;
        fill[nb] += 1;
    }

    let comp = tarjan(nodes, &start, &adj);
    let mut assignment = Vec::with_capacity(cnf.num_vars);
    for v in 0..cnf.num_vars {
        let (p, n) = (comp[Lit::pos(v).code()], comp[Lit::neg(v).code()]);
        if p == n {
            return None;
        }
        // Tarjan numbers components in reverse topological order.
        assignment.push(p < n);
    }
    Some(assignment)
}

fn tarjan(nodes: usize, start: &[usize], adj: &[u32]) -> Vec<u32> {
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; nodes];
    let mut low = vec![0u32; nodes];
    let mut comp = vec![UNSEEN; nodes];
    let mut on_stack = vec![false; nodes];
    let mut stack: Vec<u32> = Vec::new();
    let mut calls: Vec<(u32, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut components = 0u32;

    for root in 0..nodes {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        calls.push((root as u32, start[root]));
        while let Some(&mut (v, ref mut ptr)) = calls.last_mut() {
            let v = v as usize;
            if *ptr < start[v + 1] {
                let w = adj[*ptr] as usize;
                *ptr += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    calls.push((w as u32, start[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                calls.pop();
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow") as usize;
                        on_stack[w] = false;
                        comp[w] = components;
                        if w == v {
                            break;
                        }
                    }
                    components += 1;
                }
                if let Some(&(p, _)) = calls.last() {
                    let p = p as usize;
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }
    comp
}

pub fn check_via_2sat(team: &Team, f: &DisjunctionFormula) -> Result<Verdict> {
    let (cnf, pairs) = reduce_counting(team, f)?;
    let stats = EngineStats {
        clauses: Some(cnf.clauses.len()),
        pairs_scanned: Some(pairs),
        ..Default::default()
    };
    Ok(match solve_2cnf(&cnf) {
        Some(sides) => Verdict::sat(EngineKind::TwoSat, SplitCertificate::from_sides(&sides), stats),
        None => Verdict::unsat(EngineKind::TwoSat, stats),
    })
}
