//! Exhaustive split search; the reference oracle for everything else.

use crate::certificate::SplitCertificate;
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::{BoundFormula, Team};

use super::{EngineKind, EngineStats, Verdict};

pub const DEFAULT_BRUTE_CAP: usize = 25;
/// Side sets are `u64` bitmasks.
pub const MAX_BRUTE_ROWS: usize = 64;
pub const BRUTE_CAP_ENV: &str = "DEPSPLIT_BRUTE_CAP";

/// The row cap: `DEPSPLIT_BRUTE_CAP` if set, else 25.
pub fn default_brute_cap() -> Result<usize> {
    match std::env::var(BRUTE_CAP_ENV) {
        Ok(s) => {
            let cap: usize = s
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{BRUTE_CAP_ENV}={s:?} is not a row count")))?;
            if cap > MAX_BRUTE_ROWS {
                return Err(Error::Config(format!(
                    "{BRUTE_CAP_ENV}={cap} exceeds the hard limit of {MAX_BRUTE_ROWS}"
                )));
            }
            Ok(cap)
        }
        Err(_) => Ok(DEFAULT_BRUTE_CAP),
    }
}

pub fn check_bruteforce(team: &Team, f: &DisjunctionFormula) -> Result<Verdict> {
    check_bruteforce_with_cap(team, f, default_brute_cap()?)
}

pub fn check_bruteforce_with_cap(team: &Team, f: &DisjunctionFormula, cap: usize) -> Result<Verdict> {
    let cap = cap.min(MAX_BRUTE_ROWS);
    if team.len() > cap {
        return Err(Error::SizeLimit { rows: team.len(), cap });
    }
    let bound = BoundFormula::bind(team, f).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    let rows: Vec<usize> = (0..team.len()).collect();
    let mut search = SplitSearch::new(team, &bound, &rows);
    let found = search.run();
    let stats = EngineStats {
        search_nodes: Some(search.nodes),
        ..Default::default()
    };
    Ok(match found {
        Some(sides) => Verdict::sat(EngineKind::Brute, SplitCertificate::from_sides(&sides), stats),
        None => Verdict::unsat(EngineKind::Brute, stats),
    })
}

/// Decides the subteam formed by `rows` (at most 64). Returns the side of each
/// listed row (`true` = right) on success.
pub(crate) fn split_rows(team: &Team, bound: &BoundFormula, rows: &[usize]) -> Option<Vec<bool>> {
    SplitSearch::new(team, bound, rows).run()
}

struct SplitSearch {
    left_conflicts: Vec<u64>,
    right_conflicts: Vec<u64>,
    /// Rows with at least one conflict, most-constrained first.
    order: Vec<usize>,
    side: Vec<bool>,
    nodes: u64,
}

impl SplitSearch {
    fn new(team: &Team, bound: &BoundFormula, rows: &[usize]) -> Self {
        assert!(rows.len() <= MAX_BRUTE_ROWS);
        let m = rows.len();
        let mut left_conflicts = vec![0u64; m];
        let mut right_conflicts = vec![0u64; m];
        for a in 0..m {
            for b in a + 1..m {
                if bound.left.violated_by(team, rows[a], rows[b]) {
                    left_conflicts[a] |= 1 << b;
                    left_conflicts[b] |= 1 << a;
                }
                if bound.right.violated_by(team, rows[a], rows[b]) {
                    right_conflicts[a] |= 1 << b;
                    right_conflicts[b] |= 1 << a;
                }
            }
        }
        // Rows free of conflicts can sit on either side; they are simply left
        // out of the search (and end up on the left).
        let mut order: Vec<usize> = (0..m)
            .filter(|&i| left_conflicts[i] | right_conflicts[i] != 0)
            .collect();
        order.sort_by_key(|&i| {
            std::cmp::Reverse((left_conflicts[i] | right_conflicts[i]).count_ones())
        });
        Self {
            left_conflicts,
            right_conflicts,
            order,
            side: vec![false; m],
            nodes: 0,
        }
    }

    fn run(&mut self) -> Option<Vec<bool>> {
        if self.dfs(0, 0, 0) {
            Some(self.side.clone())
        } else {
            None
        }
    }

    fn dfs(&mut self, pos: usize, left: u64, right: u64) -> bool {
        self.nodes += 1;
        let Some(&i) = self.order.get(pos) else {
            return true;
        };
        let bit = 1u64 << i;
        if self.left_conflicts[i] & left == 0 {
            self.side[i] = false;
            if self.dfs(pos + 1, left | bit, right) {
                return true;
            }
        }
        if self.right_conflicts[i] & right == 0 {
            self.side[i] = true;
            if self.dfs(pos + 1, left, right | bit) {
                return true;
            }
        }
        false
    }
}
