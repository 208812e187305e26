//! Independent oracles and random instance builders shared by the
//! integration suites. Nothing here calls the library's decision procedures:
//! teams are read back as plain strings and splits are enumerated directly.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::PathBuf;

use depsplit::reductions::CnfInstance;
use depsplit::{DependenceAtom, DisjunctionFormula, Lit, Team, TeamBuilder};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VARS: [&str; 4] = ["x", "y", "z", "u"];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn formula(s: &str) -> DisjunctionFormula {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// A team as string rows, with column lookup by name.
pub struct Plain {
    vars: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Plain {
    pub fn of(team: &Team) -> Self {
        Plain {
            vars: team.vars().to_vec(),
            rows: (0..team.len()).map(|r| team.row_text(r)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    fn col(&self, v: &str) -> usize {
        self.vars.iter().position(|w| w == v).expect("variable in team")
    }

    /// Pairwise check: no two rows agree on the determiners and differ on
    /// the target.
    pub fn atom_holds(&self, atom: &DependenceAtom, rows: &[usize]) -> bool {
        let det: Vec<usize> = atom.determiners().iter().map(|d| self.col(d)).collect();
        let t = self.col(atom.target());
        for (i, &a) in rows.iter().enumerate() {
            for &b in &rows[i + 1..] {
                let (ra, rb) = (&self.rows[a], &self.rows[b]);
                if det.iter().all(|&c| ra[c] == rb[c]) && ra[t] != rb[t] {
                    return false;
                }
            }
        }
        true
    }

    /// Tries all `2^|rows|` ways to split `rows` between the disjuncts.
    pub fn splits(&self, f: &DisjunctionFormula, rows: &[usize]) -> bool {
        assert!(rows.len() <= 20, "oracle limited to 20 rows");
        (0u32..1 << rows.len()).any(|mask| {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for (i, &row) in rows.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    l.push(row);
                } else {
                    r.push(row);
                }
            }
            self.atom_holds(&f.left, &l) && self.atom_holds(&f.right, &r)
        })
    }

    pub fn satisfies(&self, f: &DisjunctionFormula) -> bool {
        self.splits(f, &(0..self.len()).collect::<Vec<_>>())
    }

    pub fn split_valid(&self, f: &DisjunctionFormula, left: &[usize], right: &[usize]) -> bool {
        let mut all: Vec<usize> = left.iter().chain(right).copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len() == self.len() && all.iter().enumerate().all(|(i, &r)| i == r)
            && self.atom_holds(&f.left, left)
            && self.atom_holds(&f.right, right)
    }
}

pub fn oracle(team: &Team, f: &DisjunctionFormula) -> bool {
    Plain::of(team).satisfies(f)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

pub fn random_team(rng: &mut impl Rng, vars: &[&str], max_rows: usize, max_range: usize) -> Team {
    let mut b = TeamBuilder::new(vars).unwrap();
    let ranges: Vec<usize> = vars.iter().map(|_| rng.gen_range(1..=max_range)).collect();
    let rows = rng.gen_range(0..=max_rows);
    for _ in 0..rows {
        let row: Vec<String> = ranges.iter().map(|&r| rng.gen_range(0..r).to_string()).collect();
        b.push_row(row).unwrap();
    }
    b.build()
}

/// A random atom over `vars`: up to three distinct variables, the last one
/// the target.
pub fn random_atom(rng: &mut impl Rng, vars: &[&str]) -> String {
    let n = rng.gen_range(1..=3.min(vars.len()));
    let picked: Vec<&str> = vars.choose_multiple(rng, n).copied().collect();
    format!("dep({})", picked.join(","))
}

pub fn random_formula(rng: &mut impl Rng, vars: &[&str]) -> DisjunctionFormula {
    formula(&format!("{} | {}", random_atom(rng, vars), random_atom(rng, vars)))
}

/// One formula per pattern, all over at most the four columns of [`VARS`].
pub const PATTERN_FORMULAS: [&str; 13] = [
    "dep(x,y) | dep(z,u)",
    "dep(x,z) | dep(y,z)",
    "dep(x,y) | dep(y,z)",
    "dep(x,y) | dep(y,x)",
    "dep(x,y) | dep(x,z)",
    "dep(x,y) | dep(x,y)",
    "dep(y) | dep(z)",
    "dep(x) | dep(y,z)",
    "dep(x) | dep(x,y)",
    "dep(y) | dep(x,y)",
    "dep(x,y,z) | dep(y,u,z)",
    "dep(x,z) | dep(x,y,u)",
    "dep(x,y,z) | dep(z,y,x)",
];

pub fn random_cnf(rng: &mut impl Rng, max_props: usize, max_clauses: usize) -> CnfInstance {
    let n = rng.gen_range(1..=max_props);
    let m = rng.gen_range(1..=max_clauses);
    let lit = |rng: &mut dyn rand::RngCore| Lit::new(rng.gen_range(0..n), rng.gen_bool(0.5));
    let clauses = (0..m).map(|_| (lit(rng), lit(rng))).collect();
    CnfInstance::new(n, clauses).unwrap()
}

/// Every assignment, literal by literal.
pub fn cnf_satisfiable(n: usize, clauses: &[(Lit, Lit)]) -> bool {
    (0u32..1 << n).any(|a| {
        let val = |l: Lit| (a >> l.var() & 1 == 1) == l.is_positive();
        clauses.iter().all(|&(p, q)| val(p) || val(q))
    })
}

/// A random forest on `nodes` nodes named `n0, n1, …`: each node after the
/// first either starts a tree or hangs off an earlier node.
pub fn random_forest(rng: &mut impl Rng, nodes: usize) -> Vec<(String, String)> {
    let attach = rng.gen_range(0.5..0.95);
    let mut edges = Vec::new();
    for i in 1..nodes {
        if rng.gen_bool(attach) {
            edges.push((format!("n{}", rng.gen_range(0..i)), format!("n{i}")));
        }
    }
    edges
}

pub fn bfs_connected(edges: &[(String, String)], u: &str, v: &str) -> bool {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = HashSet::from([u]);
    let mut queue = VecDeque::from([u]);
    while let Some(n) = queue.pop_front() {
        if n == v {
            return true;
        }
        for &m in adj.get(n).into_iter().flatten() {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    false
}

/// Clause expansion of a clique-form mtdf instance.
pub fn mtdf_clauses(pos: &[Vec<usize>], neg: &[Vec<usize>]) -> Vec<(Lit, Lit)> {
    let mut out = Vec::new();
    for (cliques, positive) in [(pos, true), (neg, false)] {
        for c in cliques {
            for (i, &a) in c.iter().enumerate() {
                for &b in &c[i + 1..] {
                    out.push((Lit::new(a, positive), Lit::new(b, positive)));
                }
            }
        }
    }
    out
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}
