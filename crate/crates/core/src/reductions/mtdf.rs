//! Monotone transitive dual-free 2SAT and its equivalence with the mutual
//! formula.
//!
//! Rows of a two-column team are the variables; rows sharing an x-value form a
//! positive clique (`x_i ∨ x_j` for every pair) and rows sharing a y-value a
//! negative clique (`¬x_i ∨ ¬x_j`). With `x_i` true meaning row `i` sits on the
//! `dep(y,x)` side, satisfying assignments and splits correspond one-to-one.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::engines::graph::check_mutual_unary;
use crate::engines::twosat::Lit;
use crate::engines::Verdict;
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::{Team, TeamBuilder};

use super::cnf::CnfInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtdfInstance {
    /// Variables are `0..num_vars`. Omitted in JSON, it defaults to one past
    /// the largest variable mentioned.
    #[serde(default)]
    pub num_vars: usize,
    pub pos_cliques: Vec<Vec<usize>>,
    pub neg_cliques: Vec<Vec<usize>>,
}

impl MtdfInstance {
    pub fn new(num_vars: usize, pos_cliques: Vec<Vec<usize>>, neg_cliques: Vec<Vec<usize>>) -> Result<Self> {
        let m = Self {
            num_vars,
            pos_cliques,
            neg_cliques,
        };
        m.validate()?;
        Ok(m)
    }

    /// Fills in `num_vars` when it was left at zero (as after JSON loading).
    pub fn with_inferred_size(mut self) -> Self {
        let max = self
            .pos_cliques
            .iter()
            .chain(&self.neg_cliques)
            .flatten()
            .map(|&v| v + 1)
            .max()
            .unwrap_or(0);
        self.num_vars = self.num_vars.max(max);
        self
    }

    /// Clique-form well-formedness: cliques of size ≥ 2 over known variables,
    /// each variable in at most one positive and one negative clique, and no
    /// pair of variables sharing both a positive and a negative clique.
    pub fn validate(&self) -> Result<()> {
        let mut pos_of = vec![usize::MAX; self.num_vars];
        let mut neg_of = vec![usize::MAX; self.num_vars];
        for (cliques, owner, kind) in [
            (&self.pos_cliques, &mut pos_of, "positive"),
            (&self.neg_cliques, &mut neg_of, "negative"),
        ] {
            for (c, clique) in cliques.iter().enumerate() {
                if clique.len() < 2 {
                    return Err(Error::InvalidInstance(format!("{kind} clique {c} has fewer than two variables")));
                }
                for &v in clique {
                    if v >= self.num_vars {
                        return Err(Error::InvalidInstance(format!(
                            "variable x{v} out of range ({} variables)",
                            self.num_vars
                        )));
                    }
                    if owner[v] != usize::MAX {
                        return Err(Error::InvalidInstance(format!(
                            "transitivity: x{v} appears in {kind} cliques {} and {c}",
                            owner[v]
                        )));
                    }
                    owner[v] = c;
                }
            }
        }
        for clique in &self.neg_cliques {
            for (i, &a) in clique.iter().enumerate() {
                for &b in &clique[i + 1..] {
                    if pos_of[a] != usize::MAX && pos_of[a] == pos_of[b] {
                        return Err(Error::InvalidInstance(format!(
                            "dual-freeness: both (x{a} ∨ x{b}) and (¬x{a} ∨ ¬x{b}) are clauses"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every pairwise clause implied by the cliques.
    pub fn to_cnf(&self) -> CnfInstance {
        let mut clauses = Vec::new();
        for (cliques, positive) in [(&self.pos_cliques, true), (&self.neg_cliques, false)] {
            for clique in cliques {
                for (i, &a) in clique.iter().enumerate() {
                    for &b in &clique[i + 1..] {
                        clauses.push((Lit::new(a, positive), Lit::new(b, positive)));
                    }
                }
            }
        }
        CnfInstance::new(self.num_vars, clauses).expect("validated indices")
    }

    /// Cliques as sorted sets, sorted: equal for instances that differ only in
    /// clique order or the order within a clique.
    pub fn canonical(&self) -> (usize, Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let norm = |cs: &Vec<Vec<usize>>| {
            let mut cs: Vec<Vec<usize>> = cs
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.sort_unstable();
                    c
                })
                .collect();
            cs.sort();
            cs
        };
        (self.num_vars, norm(&self.pos_cliques), norm(&self.neg_cliques))
    }
}

/// The relational view of a two-column team: `P(row, c)` when the row's x-value
/// is the `c`-th distinct x-value (first-appearance order), `N` likewise for y.
pub fn mtdf_facts(team: &Team) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    if team.width() != 2 {
        return Err(Error::DomainMismatch(format!(
            "expected a team over two variables, got {}",
            team.width()
        )));
    }
    let ids = |col: usize| {
        let mut seen = HashMap::new();
        (0..team.len())
            .map(|r| {
                let next = seen.len();
                (r, *seen.entry(team.cell(r, col)).or_insert(next))
            })
            .collect::<Vec<_>>()
    };
    Ok((ids(0), ids(1)))
}

/// Groups rows by x-value (positive cliques) and by y-value (negative
/// cliques), dropping singleton groups.
pub fn team_to_mtdf(team: &Team) -> Result<MtdfInstance> {
    let (p, n) = mtdf_facts(team)?;
    let group = |facts: Vec<(usize, usize)>| {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (row, c) in facts {
            if c == groups.len() {
                groups.push(Vec::new());
            }
            groups[c].push(row);
        }
        groups.retain(|g| g.len() >= 2);
        groups
    };
    Ok(MtdfInstance {
        num_vars: team.len(),
        pos_cliques: group(p),
        neg_cliques: group(n),
    })
}

/// One row per variable: x is its positive clique (`P<c>`, or a private
/// `p<v>`), y its negative clique (`N<c>` / `n<v>`). Rows are labelled `s<v>`.
pub fn mtdf_to_team(m: &MtdfInstance) -> Result<Team> {
    m.validate()?;
    let mut x: Vec<String> = (0..m.num_vars).map(|v| format!("p{v}")).collect();
    let mut y: Vec<String> = (0..m.num_vars).map(|v| format!("n{v}")).collect();
    for (c, clique) in m.pos_cliques.iter().enumerate() {
        for &v in clique {
            x[v] = format!("P{c}");
        }
    }
    for (c, clique) in m.neg_cliques.iter().enumerate() {
        for &v in clique {
            y[v] = format!("N{c}");
        }
    }
    let mut b = TeamBuilder::new(["x", "y"])?;
    for v in 0..m.num_vars {
        b.push_labelled_row(format!("s{v}"), [&x[v], &y[v]])?;
    }
    Ok(b.build())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtdfSolution {
    pub satisfiable: bool,
    pub assignment: Option<Vec<bool>>,
    pub verdict: Verdict,
}

/// Decides an mtdf instance through the mutual-formula graph engine. In the
/// returned assignment a variable is true iff its row went to the `dep(y,x)`
/// side of the split.
pub fn solve_mtdf(m: &MtdfInstance) -> Result<MtdfSolution> {
    let team = mtdf_to_team(m)?;
    let f: DisjunctionFormula = "dep(x,y) | dep(y,x)".parse().expect("valid formula");
    let verdict = check_mutual_unary(&team, &f)?;
    let assignment = verdict.certificate.as_ref().map(|c| {
        let mut a = vec![false; m.num_vars];
        for &r in &c.right_rows {
            a[r] = true;
        }
        a
    });
    Ok(MtdfSolution {
        satisfiable: verdict.satisfied,
        assignment,
        verdict,
    })
}

/// Checks that a raw 2CNF is monotone, dual-free and transitive, returning
/// its clique form. Violations name a witnessing clause or clause pair.
pub fn validate_mtdf(cnf: &CnfInstance) -> Result<MtdfInstance> {
    let mut pos: HashSet<(usize, usize)> = HashSet::new();
    let mut neg: HashSet<(usize, usize)> = HashSet::new();
    let show = |a: Lit, b: Lit| format!("({a} ∨ {b})");
    for &(a, b) in cnf.clauses() {
        if a.is_positive() != b.is_positive() {
            return Err(Error::InvalidInstance(format!("monotonicity: clause {} mixes signs", show(a, b))));
        }
        if a.var() == b.var() {
            return Err(Error::InvalidInstance(format!(
                "monotonicity: clause {} repeats a variable",
                show(a, b)
            )));
        }
        let key = (a.var().min(b.var()), a.var().max(b.var()));
        if a.is_positive() {
            pos.insert(key);
        } else {
            neg.insert(key);
        }
    }
    let mut shared: Vec<&(usize, usize)> = pos.intersection(&neg).collect();
    shared.sort();
    if let Some(&&(i, j)) = shared.first() {
        return Err(Error::InvalidInstance(format!(
            "dual-freeness: (x{i} ∨ x{j}) and (¬x{i} ∨ ¬x{j}) are both clauses"
        )));
    }
    let n = cnf.num_props();
    let pos_cliques = cliques_of(n, &pos, "x", "x")?;
    let neg_cliques = cliques_of(n, &neg, "¬x", "¬x")?;
    MtdfInstance::new(n, pos_cliques, neg_cliques)
}

/// Connected components of the clause graph, each of which must be complete.
fn cliques_of(n: usize, pairs: &HashSet<(usize, usize)>, a: &str, b: &str) -> Result<Vec<Vec<usize>>> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(i, j) in pairs {
        adj[i].insert(j);
        adj[j].insert(i);
    }
    // Transitivity: any two neighbours of a variable must be adjacent.
    for j in 0..n {
        let nb: Vec<usize> = adj[j].iter().copied().collect();
        for (p, &i) in nb.iter().enumerate() {
            for &k in &nb[p + 1..] {
                if !adj[i].contains(&k) {
                    return Err(Error::InvalidInstance(format!(
                        "transitivity: ({a}{i} ∨ {b}{j}) and ({a}{j} ∨ {b}{k}) are clauses but ({a}{i} ∨ {b}{k}) is not"
                    )));
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if seen[v] || adj[v].is_empty() {
            continue;
        }
        let mut clique = vec![v];
        clique.extend(adj[v].iter().copied());
        for &w in &clique {
            seen[w] = true;
        }
        out.push(clique);
    }
    Ok(out)
}
