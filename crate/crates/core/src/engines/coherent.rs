//! The k-subteam engine for coherent formulas: `T ⊨ φ` iff every subteam of
//! at most `k` rows does.
//!
//! Only subteams that are connected in the conflict graph (rows joined when
//! the pair violates either atom) need checking: if a failing subteam fell
//! apart into two conflict-free halves, the halves' splits would combine, so
//! a minimal failing subteam is always connected.

use crate::certificate::{verify_split, SplitCertificate};
use crate::classifier::{classify, Coherence};
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::{BoundFormula, Team};

use super::brute::split_rows;
use super::twosat::check_via_2sat;
use super::{EngineKind, EngineStats, Verdict};

const LEFT: u8 = 1;
const RIGHT: u8 = 2;

struct ConflictGraph {
    /// Sorted `(neighbour, LEFT|RIGHT flags)`.
    adj: Vec<Vec<(u32, u8)>>,
}

impl ConflictGraph {
    fn build(team: &Team, bound: &BoundFormula) -> Self {
        let n = team.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                let mut flags = 0;
                if bound.left.violated_by(team, i, j) {
                    flags |= LEFT;
                }
                if bound.right.violated_by(team, i, j) {
                    flags |= RIGHT;
                }
                if flags != 0 {
                    adj[i].push((j as u32, flags));
                    adj[j].push((i as u32, flags));
                }
            }
        }
        Self { adj }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search_by_key(&(b as u32), |&(w, _)| w).is_ok()
    }
}

fn require_level(f: &DisjunctionFormula, k: usize) -> Result<()> {
    let c = classify(f);
    match c.coherence {
        Coherence::Level(level) if level <= k => Ok(()),
        Coherence::Level(level) => Err(Error::Classification(format!(
            "{f} has coherence level {level}, subteams of size {k} do not decide it"
        ))),
        _ => Err(Error::Classification(format!("{f} is not known to be coherent"))),
    }
}

/// Decides `T ⊨ f` by checking the connected subteams of at most `k` rows.
/// `f` must be classified coherent with level at most `k`.
pub fn check_coherent_case(team: &Team, f: &DisjunctionFormula, k: usize) -> Result<Verdict> {
    require_level(f, k)?;
    let bound = BoundFormula::bind(team, f).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    let graph = ConflictGraph::build(team, &bound);
    let mut esu = Esu {
        team,
        bound: &bound,
        graph: &graph,
        k,
        checked: 0,
        failed: None,
    };
    esu.run();
    let mut stats = EngineStats {
        subteams_checked: Some(esu.checked),
        ..Default::default()
    };
    let engine = EngineKind::Coherent { k };
    if esu.failed.is_some() {
        return Ok(Verdict::unsat(engine, stats));
    }
    let cert = match greedy_split(&graph) {
        Some(c) if verify_split(team, &c, f)? => c,
        _ => {
            let v = check_via_2sat(team, f)?;
            stats.clauses = v.stats.clauses;
            match v.certificate {
                Some(c) => c,
                None => {
                    return Err(Error::EngineDisagreement(format!(
                        "all subteams of size ≤ {k} satisfy {f} but 2SAT finds no split"
                    )))
                }
            }
        }
    };
    Ok(Verdict::sat(engine, cert, stats))
}

/// Baseline for benchmarking: checks every subteam of 3..=k rows, connected
/// or not. Same preconditions and answers as [`check_coherent_case`].
pub fn check_coherent_naive(team: &Team, f: &DisjunctionFormula, k: usize) -> Result<Verdict> {
    require_level(f, k)?;
    let bound = BoundFormula::bind(team, f).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    let n = team.len();
    let mut checked = 0usize;
    for size in 3..=k.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            checked += 1;
            if split_rows(team, &bound, &idx).is_none() {
                let stats = EngineStats {
                    subteams_checked: Some(checked),
                    ..Default::default()
                };
                return Ok(Verdict::unsat(EngineKind::Coherent { k }, stats));
            }
            // Next combination in lexicographic order.
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    let v = check_via_2sat(team, f)?;
    let cert = v.certificate.ok_or_else(|| {
        Error::EngineDisagreement(format!("all subteams of size ≤ {k} satisfy {f} but 2SAT finds no split"))
    })?;
    let stats = EngineStats {
        subteams_checked: Some(checked),
        ..Default::default()
    };
    Ok(Verdict::sat(EngineKind::Coherent { k }, cert, stats))
}

/// Rows in order, each to the left unless that creates a left conflict, else
/// to the right. Not complete; callers verify and fall back.
fn greedy_split(graph: &ConflictGraph) -> Option<SplitCertificate> {
    const UNSET: u8 = 0;
    let n = graph.adj.len();
    let mut side = vec![UNSET; n];
    for i in 0..n {
        let blocked = |s: u8| {
            graph.adj[i]
                .iter()
                .any(|&(j, flags)| side[j as usize] == s && flags & s != 0)
        };
        if !blocked(LEFT) {
            side[i] = LEFT;
        } else if !blocked(RIGHT) {
            side[i] = RIGHT;
        } else {
            return None;
        }
    }
    let sides: Vec<bool> = side.iter().map(|&s| s == RIGHT).collect();
    Some(SplitCertificate::from_sides(&sides))
}

/// Enumerates connected vertex sets of size ≤ k, each exactly once, in the
/// style of the ESU subgraph enumeration (every set is grown from its
/// smallest vertex through exclusive neighbourhoods).
struct Esu<'a> {
    team: &'a Team,
    bound: &'a BoundFormula,
    graph: &'a ConflictGraph,
    k: usize,
    checked: usize,
    failed: Option<Vec<usize>>,
}

impl Esu<'_> {
    fn run(&mut self) {
        let n = self.graph.adj.len();
        for v in 0..n {
            let ext: Vec<usize> = self.graph.adj[v]
                .iter()
                .map(|&(w, _)| w as usize)
                .filter(|&w| w > v)
                .collect();
            let mut sub = vec![v];
            if self.extend(&mut sub, ext, v) {
                return;
            }
        }
    }

    /// Returns `true` once a failing subteam has been found.
    fn extend(&mut self, sub: &mut Vec<usize>, mut ext: Vec<usize>, root: usize) -> bool {
        // One or two rows always split.
        if sub.len() >= 3 {
            self.checked += 1;
            if split_rows(self.team, self.bound, sub).is_none() {
                self.failed = Some(sub.clone());
                return true;
            }
        }
        if sub.len() == self.k {
            return false;
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &(u, _) in &self.graph.adj[w] {
                let u = u as usize;
                if u > root && !sub.contains(&u) && !sub.iter().any(|&s| self.graph.adjacent(s, u)) {
                    next.push(u);
                }
            }
            sub.push(w);
            let found = self.extend(sub, next, root);
            sub.pop();
            if found {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn team_a() -> Team {
        Team::from_rows(
            &["x", "y", "z"],
            &[["1", "1", "1"], ["1", "1", "2"], ["1", "2", "1"], ["1", "2", "2"]],
        )
        .unwrap()
    }

    #[test]
    fn team_a_fails_at_four() {
        let f = parse_formula("dep(x,y) | dep(x,z)").unwrap();
        let v = check_coherent_case(&team_a(), &f, 4).unwrap();
        assert!(!v.satisfied);
        for drop in 0..4 {
            let rows: Vec<usize> = (0..4).filter(|&r| r != drop).collect();
            let sub = team_a().subteam(&rows);
            assert!(check_coherent_case(&sub, &f, 4).unwrap().satisfied);
        }
    }

    #[test]
    fn identical_atoms_three_targets() {
        let t = Team::from_rows(&["x", "y"], &[["1", "1"], ["1", "2"], ["1", "3"]]).unwrap();
        let f = parse_formula("dep(x,y) | dep(x,y)").unwrap();
        assert!(!check_coherent_case(&t, &f, 3).unwrap().satisfied);
        assert!(!check_coherent_naive(&t, &f, 3).unwrap().satisfied);
    }

    #[test]
    fn incoherent_formula_rejected() {
        let f = parse_formula("dep(x,y) | dep(y,x)").unwrap();
        let t = Team::empty(["x", "y"]).unwrap();
        assert!(matches!(check_coherent_case(&t, &f, 10), Err(Error::Classification(_))));
        let g = parse_formula("dep(x,y) | dep(x,z)").unwrap();
        let t = Team::empty(["x", "y", "z"]).unwrap();
        assert!(matches!(check_coherent_case(&t, &g, 3), Err(Error::Classification(_))));
    }

    #[test]
    fn esu_counts_connected_sets() {
        // Path 0-1-2-3 under a formula whose conflicts are exactly consecutive
        // rows: connected sets of size 3 are {0,1,2},{1,2,3}.
        let t = Team::from_rows(&["x", "y", "z"], &[["a", "1", "1"], ["a", "2", "1"], ["b", "2", "2"], ["b", "3", "2"]]).unwrap();
        let f = parse_formula("dep(x,y) | dep(y,z)").unwrap();
        let bound = BoundFormula::bind(&t, &f).unwrap();
        let graph = ConflictGraph::build(&t, &bound);
        let mut esu = Esu {
            team: &t,
            bound: &bound,
            graph: &graph,
            k: 4,
            checked: 0,
            failed: None,
        };
        esu.run();
        // Sizes 3 and 4: {0,1,2}, {1,2,3}, {0,1,2,3}.
        assert_eq!(esu.checked, 3);
    }
}
