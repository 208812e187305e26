//! Coherence counterexamples, incoherence families and witness checking.
//!
//! A formula is k-coherent when a team satisfies it as soon as all its
//! subteams of at most k rows do. A [`CoherenceWitness`] refutes
//! k-coherence: the team fails the formula but every k-row subteam passes.

use serde::Serialize;

use crate::certificate::SplitCertificate;
use crate::classifier::{dispatch, ConstancyMixKind, FormulaPattern};
use crate::engines::brute::{check_bruteforce_with_cap, default_brute_cap};
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::Team;

pub mod search;

pub use search::{search_coherence_level, LevelEstimate, SearchReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceWitness {
    #[serde(skip)]
    pub team: Team,
    pub formula: DisjunctionFormula,
    pub k: usize,
}

fn formula(s: &str) -> DisjunctionFormula {
    s.parse().expect("built-in formula parses")
}

/// The stored team refuting `(level−1)`-coherence for a coherent pattern.
pub fn counterexample_team(pattern: FormulaPattern) -> Result<CoherenceWitness> {
    let four = |rows: &[[&str; 3]]| Team::from_labelled_rows(&["x", "y", "z"], 1, rows);
    let (team, f, k) = match pattern {
        FormulaPattern::SameSourceUnary => (
            four(&[["1", "1", "1"], ["1", "1", "2"], ["1", "2", "1"], ["1", "2", "2"]])?,
            "dep(x,y) | dep(x,z)",
            3,
        ),
        FormulaPattern::ConstancyMix(ConstancyMixKind::Disjoint) => (
            four(&[["1", "1", "1"], ["1", "1", "2"], ["2", "2", "1"], ["2", "2", "2"]])?,
            "dep(x) | dep(y,z)",
            3,
        ),
        FormulaPattern::ConstancyMix(ConstancyMixKind::OnDeterminer) => (
            Team::from_labelled_rows(&["x", "y"], 1, &[["1", "1"], ["1", "2"], ["2", "1"], ["2", "2"]])?,
            "dep(x) | dep(x,y)",
            3,
        ),
        // Printed elsewhere with x and y the other way round, where
        // x is a key and dep(x,y) alone holds; transposed it refutes 3-coherence.
        FormulaPattern::ConstancyMix(ConstancyMixKind::OnTarget) => (
            Team::from_labelled_rows(&["x", "y"], 1, &[["1", "1"], ["1", "2"], ["2", "3"], ["2", "4"]])?,
            "dep(y) | dep(x,y)",
            3,
        ),
        FormulaPattern::ConstancyPair => (
            Team::from_labelled_rows(&["y", "z"], 1, &[["1", "1"], ["1", "2"], ["2", "1"], ["2", "2"]])?,
            "dep(y) | dep(z)",
            3,
        ),
        FormulaPattern::IdenticalAtoms => (
            Team::from_labelled_rows(&["x", "y"], 1, &[["1", "1"], ["1", "2"], ["1", "3"]])?,
            "dep(x,y) | dep(x,y)",
            2,
        ),
        // Team (a) with a constant extra determiner column.
        FormulaPattern::HigherArityContained => (
            Team::from_labelled_rows(
                &["x", "z", "y", "u"],
                1,
                &[["1", "1", "a", "1"], ["1", "1", "a", "2"], ["1", "2", "a", "1"], ["1", "2", "a", "2"]],
            )?,
            "dep(x,z) | dep(x,y,u)",
            3,
        ),
        other => {
            return Err(Error::UnsupportedPattern(format!("no stored counterexample for {other}")))
        }
    };
    Ok(CoherenceWitness {
        team,
        formula: formula(f),
        k,
    })
}

/// The formula an incoherence family is built for.
pub fn family_formula(pattern: FormulaPattern) -> Result<DisjunctionFormula> {
    Ok(formula(match pattern {
        FormulaPattern::MutualUnary => "dep(x,y) | dep(y,x)",
        FormulaPattern::ChainUnary => "dep(x,y) | dep(y,z)",
        FormulaPattern::SharedTargetUnary => "dep(x,z) | dep(y,z)",
        other => return Err(Error::UnsupportedPattern(format!("no incoherence family for {other}"))),
    }))
}

/// `(x, y)` pairs of the cyclic team `T_n`: `s_0 = (1, n/2)`,
/// `s_{2t−1} = (t, t)`, `s_{2t} = (t, t+1)` with `t+1` wrapping to 1.
fn cyclic_pairs(n: usize) -> Vec<(usize, usize)> {
    let h = n / 2;
    let mut rows = vec![(1, h)];
    for t in 1..=h {
        rows.push((t, t));
        rows.push((t, if t == h { 1 } else { t + 1 }));
    }
    rows
}

/// For `n = 4` the cyclic construction degenerates (`s_0 = s_2`), and no
/// five-row team fails the mutual formula at all: a failing component needs
/// more edges than nodes, which takes at least six edges in a bipartite
/// graph. The smallest such team, `K_{2,3}`, is used instead.
fn k23_pairs() -> Vec<(usize, usize)> {
    let mut rows = Vec::new();
    for a in 1..=2 {
        for b in 1..=3 {
            rows.push((a, b));
        }
    }
    rows
}

/// A team that fails the pattern's formula while all its `n`-row subteams
/// satisfy it. `n` must be even and at least 4.
pub fn incoherence_family(pattern: FormulaPattern, n: usize) -> Result<Team> {
    family_formula(pattern)?;
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("family size must be even and ≥ 4, got {n}")));
    }
    let small = n == 4;
    let pairs = if small { k23_pairs() } else { cyclic_pairs(n) };
    let third = |i: usize, (a, b): (usize, usize)| -> usize {
        match pattern {
            FormulaPattern::ChainUnary => a,
            // Rows sharing x or y must differ on z.
            _ if small => (a + b) % 3,
            _ if i == 0 => 3,
            _ => 2 - i % 2,
        }
    };
    let first = usize::from(small);
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let mut row = vec![a.to_string(), b.to_string()];
            if pattern != FormulaPattern::MutualUnary {
                row.push(third(i, (a, b)).to_string());
            }
            row
        })
        .collect();
    let vars: &[&str] = if pattern == FormulaPattern::MutualUnary {
        &["x", "y"]
    } else {
        &["x", "y", "z"]
    };
    Team::from_labelled_rows(vars, first, &rows)
}

/// The explicit split of `T_n ∖ {s_i}` for the cyclic family (`n ≥ 6`),
/// with row indices relative to that subteam. Rows past the gap switch
/// sides, `s_0` moves to the `dep(x,y)` side and `s_1` to the other.
pub fn resplit_after_removal(n: usize, i: usize) -> Result<SplitCertificate> {
    if n < 6 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("explicit re-split needs even n ≥ 6, got {n}")));
    }
    if i > n {
        return Err(Error::InvalidParameter(format!("row s{i} does not exist in T_{n}")));
    }
    let odd = |j: usize| j % 2 == 1;
    // Left side holds dep(x,y); on the full team odd rows are left.
    let left_original = |j: usize| -> bool {
        match i {
            0 => odd(j),
            1 => j == 0 || (j >= 3 && odd(j)),
            _ => j == 0 || (1 < j && j < i && odd(j)) || (j > i && !odd(j)),
        }
    };
    let mut left = Vec::new();
    let mut right = Vec::new();
    for j in (0..=n).filter(|&j| j != i) {
        let pos = if j < i { j } else { j - 1 };
        if left_original(j) {
            left.push(pos);
        } else {
            right.push(pos);
        }
    }
    Ok(SplitCertificate::new(left, right))
}

/// Subsets of `0..n` of size `k` in lexicographic order; stops early when
/// `visit` returns `false`.
pub(crate) fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// True iff the team fails the formula and every subteam of `min(k, |T|)`
/// rows satisfies it. Subteams are decided by brute force when within the
/// row cap, otherwise by the dispatcher.
pub fn verify_incoherence_witness(w: &CoherenceWitness) -> Result<bool> {
    if dispatch(&w.team, &w.formula)?.satisfied {
        return Ok(false);
    }
    let cap = default_brute_cap()?;
    let size = w.k.min(w.team.len());
    let mut all_pass = true;
    let mut error = None;
    for_each_subset(w.team.len(), size, |rows| {
        let sub = w.team.subteam(rows);
        let verdict = if sub.len() <= cap {
            check_bruteforce_with_cap(&sub, &w.formula, cap)
        } else {
            dispatch(&sub, &w.formula)
        };
        match verdict {
            Ok(v) if v.satisfied => true,
            Ok(_) => {
                all_pass = false;
                false
            }
            Err(e) => {
                error = Some(e);
                false
            }
        }
    });
    match error {
        Some(e) => Err(e),
        None => Ok(all_pass),
    }
}
