//! Bounded search for a formula's coherence level.
//!
//! The level is the size of the largest *critical* team — one that fails
//! the formula while every proper subteam satisfies it. Critical teams are
//! connected in the conflict graph, and dropping a non-cut row leaves a
//! connected satisfying team, so every critical team of size `s+1` extends a
//! connected satisfying team of size `s` by one conflicting row. The search
//! grows those teams level by level, up to value renaming, over at most
//! `max_rows` rows and `max_range` values per column. The answer is exact
//! within those bounds and nothing more.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{DependenceAtom, DisjunctionFormula};
use crate::team::{Team, TeamBuilder};

pub const DEFAULT_MAX_ROWS: usize = 7;
pub const DEFAULT_MAX_RANGE: usize = 4;
const MAX_ROWS_LIMIT: usize = 16;
const MAX_RANGE_LIMIT: usize = 16;
const NONE: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "rows", rename_all = "kebab-case")]
pub enum LevelEstimate {
    /// Every failing team within bounds has a failing subteam of this size.
    Level(usize),
    /// Critical teams exist at the row bound itself.
    IncoherentUpTo(usize),
}

impl fmt::Display for LevelEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelEstimate::Level(k) => write!(f, "coherence level {k}"),
            LevelEstimate::IncoherentUpTo(n) => write!(f, "incoherent up to {n} rows"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub estimate: LevelEstimate,
    /// Sizes at which critical teams were found, ascending.
    pub critical_sizes: Vec<usize>,
    /// Connected satisfying teams (up to renaming) per size, from size 1.
    pub teams_per_size: Vec<usize>,
    pub max_rows: usize,
    pub max_range: usize,
    /// A critical team of the largest size found.
    #[serde(skip)]
    pub witness: Option<Team>,
}

impl SearchReport {
    pub fn bounds(&self) -> String {
        format!(
            "exact within bounds: ≤{} rows, ≤{} values per column",
            self.max_rows, self.max_range
        )
    }
}

struct Atom {
    det: Vec<usize>,
    target: usize,
}

impl Atom {
    fn new(atom: &DependenceAtom, vars: &[&str]) -> Self {
        let col = |v: &str| vars.iter().position(|&w| w == v).expect("free variable");
        Atom {
            det: atom.determiners().iter().map(|d| col(d)).collect(),
            target: col(atom.target()),
        }
    }

    fn conflict(&self, a: &[u8], b: &[u8]) -> bool {
        a[self.target] != b[self.target] && self.det.iter().all(|&c| a[c] == b[c])
    }
}

struct Space {
    w: usize,
    left: Atom,
    right: Atom,
    max_range: usize,
}

impl Space {
    fn row<'a>(&self, team: &'a [u8], i: usize) -> &'a [u8] {
        &team[i * self.w..(i + 1) * self.w]
    }

    /// Whether the rows (all but `skip`) split into a left- and a
    /// right-consistent part.
    fn satisfies(&self, team: &[u8], skip: Option<usize>) -> bool {
        let rows: Vec<&[u8]> = (0..team.len() / self.w)
            .filter(|&i| Some(i) != skip)
            .map(|i| self.row(team, i))
            .collect();
        let n = rows.len();
        let mut lmask = vec![0u32; n];
        let mut rmask = vec![0u32; n];
        for i in 0..n {
            for j in 0..i {
                if self.left.conflict(rows[i], rows[j]) {
                    lmask[i] |= 1 << j;
                }
                if self.right.conflict(rows[i], rows[j]) {
                    rmask[i] |= 1 << j;
                }
            }
        }
        fn go(i: usize, l: u32, r: u32, lm: &[u32], rm: &[u32]) -> bool {
            if i == lm.len() {
                return true;
            }
            (lm[i] & l == 0 && go(i + 1, l | 1 << i, r, lm, rm))
                || (rm[i] & r == 0 && go(i + 1, l, r | 1 << i, lm, rm))
        }
        go(0, 0, 0, &lmask, &rmask)
    }

    fn conflicts_with_any(&self, team: &[u8], cand: &[u8]) -> bool {
        team.chunks(self.w)
            .any(|r| self.left.conflict(r, cand) || self.right.conflict(r, cand))
    }

    /// One-row extensions of a canonical team: each column takes a value
    /// already present or the next fresh one.
    fn candidates(&self, team: &[u8]) -> Vec<Vec<u8>> {
        let mut used = vec![0usize; self.w];
        for r in team.chunks(self.w) {
            for (c, &v) in r.iter().enumerate() {
                used[c] = used[c].max(v as usize + 1);
            }
        }
        let radix: Vec<usize> = used.iter().map(|&u| (u + 1).min(self.max_range)).collect();
        let mut out = Vec::new();
        let mut cur = vec![0u8; self.w];
        loop {
            if !team.chunks(self.w).any(|r| r == cur.as_slice()) && self.conflicts_with_any(team, &cur) {
                out.push(cur.clone());
            }
            let mut c = 0;
            loop {
                if c == self.w {
                    return out;
                }
                cur[c] += 1;
                if (cur[c] as usize) < radix[c] {
                    break;
                }
                cur[c] = 0;
                c += 1;
            }
        }
    }

    /// Lexicographically least row sequence over all row orders, with each
    /// column's values renamed in order of first appearance.
    fn canonical(&self, team: &[u8]) -> Vec<u8> {
        let n = team.len() / self.w;
        let mut st = Canon {
            space: self,
            team,
            n,
            labels: vec![NONE; self.w * MAX_RANGE_LIMIT],
            next: vec![0; self.w],
            prefix: Vec::with_capacity(team.len()),
            best: None,
        };
        st.go(0);
        st.best.expect("non-empty search")
    }
}

struct Canon<'a> {
    space: &'a Space,
    team: &'a [u8],
    n: usize,
    labels: Vec<u8>,
    next: Vec<u8>,
    prefix: Vec<u8>,
    best: Option<Vec<u8>>,
}

impl Canon<'_> {
    fn relabel(&self, r: usize, out: &mut [u8]) {
        let w = self.space.w;
        for c in 0..w {
            let v = self.team[r * w + c] as usize;
            let l = self.labels[c * MAX_RANGE_LIMIT + v];
            out[c] = if l == NONE { self.next[c] } else { l };
        }
    }

    fn go(&mut self, used: u32) {
        let w = self.space.w;
        let depth = self.prefix.len() / w;
        if depth == self.n {
            if self.best.as_ref().map_or(true, |b| self.prefix < *b) {
                self.best = Some(self.prefix.clone());
            }
            return;
        }
        let mut min = vec![NONE; w];
        let mut tuple = vec![0u8; w];
        let mut ties: Vec<usize> = Vec::new();
        for r in (0..self.n).filter(|&r| used & 1 << r == 0) {
            self.relabel(r, &mut tuple);
            match tuple.cmp(&min) {
                std::cmp::Ordering::Less => {
                    min.copy_from_slice(&tuple);
                    ties.clear();
                    ties.push(r);
                }
                std::cmp::Ordering::Equal => ties.push(r),
                std::cmp::Ordering::Greater => {}
            }
        }
        for r in ties {
            let mut undo = Vec::new();
            for c in 0..w {
                let slot = c * MAX_RANGE_LIMIT + self.team[r * w + c] as usize;
                if self.labels[slot] == NONE {
                    self.labels[slot] = self.next[c];
                    self.next[c] += 1;
                    undo.push((slot, c));
                }
            }
            self.prefix.extend_from_slice(&min);
            let len = self.prefix.len();
            if self.best.as_ref().map_or(true, |b| self.prefix[..] <= b[..len]) {
                self.go(used | 1 << r);
            }
            self.prefix.truncate(depth * w);
            for (slot, c) in undo {
                self.labels[slot] = NONE;
                self.next[c] -= 1;
            }
        }
    }
}

enum Outcome {
    Grow(Vec<u8>),
    Critical(Vec<u8>),
}

/// Searches for the coherence level of `f` over teams of at most `max_rows`
/// rows with at most `max_range` values per column.
pub fn search_coherence_level(f: &DisjunctionFormula, max_rows: usize, max_range: usize) -> Result<SearchReport> {
    if !(1..=MAX_ROWS_LIMIT).contains(&max_rows) {
        return Err(Error::InvalidParameter(format!(
            "max_rows must be in 1..={MAX_ROWS_LIMIT}, got {max_rows}"
        )));
    }
    if !(1..=MAX_RANGE_LIMIT).contains(&max_range) {
        return Err(Error::InvalidParameter(format!(
            "max_range must be in 1..={MAX_RANGE_LIMIT}, got {max_range}"
        )));
    }
    let vars = f.free_variables();
    let space = Space {
        w: vars.len(),
        left: Atom::new(&f.left, &vars),
        right: Atom::new(&f.right, &vars),
        max_range,
    };
    let mut level: Vec<Vec<u8>> = vec![vec![0; space.w]];
    let mut teams_per_size = vec![1];
    let mut critical_sizes = Vec::new();
    let mut witness: Option<Vec<u8>> = None;

    for size in 2..=max_rows {
        let last = size == max_rows;
        let expand = |team: &Vec<u8>| -> Vec<Outcome> {
            let mut out = Vec::new();
            for cand in space.candidates(team) {
                let mut ext = team.clone();
                ext.extend_from_slice(&cand);
                if space.satisfies(&ext, None) {
                    if !last {
                        out.push(Outcome::Grow(space.canonical(&ext)));
                    }
                } else if (0..size - 1).all(|j| space.satisfies(&ext, Some(j))) {
                    out.push(Outcome::Critical(ext));
                    if last {
                        break;
                    }
                }
            }
            out
        };
        let (next, critical) = if last {
            let hit = level.par_iter().find_map_any(|t| {
                expand(t).into_iter().find_map(|o| match o {
                    Outcome::Critical(ext) => Some(ext),
                    Outcome::Grow(_) => None,
                })
            });
            (HashSet::new(), hit)
        } else {
            level
                .par_iter()
                .fold(
                    || (HashSet::new(), None),
                    |(mut set, mut crit): (HashSet<Vec<u8>>, Option<Vec<u8>>), t| {
                        for o in expand(t) {
                            match o {
                                Outcome::Grow(c) => {
                                    set.insert(c);
                                }
                                Outcome::Critical(ext) => crit = crit.or(Some(ext)),
                            }
                        }
                        (set, crit)
                    },
                )
                .reduce(
                    || (HashSet::new(), None),
                    |(mut a, ca), (b, cb)| {
                        if a.len() < b.len() {
                            return {
                                let mut b = b;
                                b.extend(a);
                                (b, ca.or(cb))
                            };
                        }
                        a.extend(b);
                        (a, ca.or(cb))
                    },
                )
        };
        if let Some(ext) = critical {
            critical_sizes.push(size);
            witness = Some(space.canonical(&ext));
        }
        if last {
            break;
        }
        log::debug!("coherence search: {} connected satisfying teams of size {size}", next.len());
        teams_per_size.push(next.len());
        if next.is_empty() {
            break;
        }
        let mut sorted: Vec<Vec<u8>> = next.into_iter().collect();
        sorted.sort_unstable();
        level = sorted;
    }

    let estimate = match critical_sizes.last() {
        Some(&s) if s == max_rows => LevelEstimate::IncoherentUpTo(max_rows),
        Some(&s) => LevelEstimate::Level(s),
        None => LevelEstimate::Level(1),
    };
    let witness = witness.map(|flat| to_team(&vars, space.w, &flat)).transpose()?;
    Ok(SearchReport {
        estimate,
        critical_sizes,
        teams_per_size,
        max_rows,
        max_range,
        witness,
    })
}

fn to_team(vars: &[&str], w: usize, flat: &[u8]) -> Result<Team> {
    let mut b = TeamBuilder::new(vars)?;
    for (i, r) in flat.chunks(w).enumerate() {
        b.push_labelled_row(format!("s{}", i + 1), r.iter().map(|v| (v + 1).to_string()))?;
    }
    Ok(b.build())
}
