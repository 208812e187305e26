use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::{BoundAtom, Team};

/// Witness for `T ⊨ φ ∨ ψ`: two row sets whose union is the whole team, the
/// first satisfying the left atom and the second the right one. Row indices
/// refer to the team's row order. Overlap is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SplitCertificate {
    pub left_rows: Vec<usize>,
    pub right_rows: Vec<usize>,
}

impl SplitCertificate {
    pub fn new(mut left_rows: Vec<usize>, mut right_rows: Vec<usize>) -> Self {
        left_rows.sort_unstable();
        left_rows.dedup();
        right_rows.sort_unstable();
        right_rows.dedup();
        Self { left_rows, right_rows }
    }

    /// From a side assignment: `sides[i] == true` puts row `i` on the right.
    pub fn from_sides(sides: &[bool]) -> Self {
        let (right, left): (Vec<usize>, Vec<usize>) = (0..sides.len()).partition(|&i| sides[i]);
        Self {
            left_rows: left,
            right_rows: right,
        }
    }

    /// Row names of each side, for display.
    pub fn named(&self, team: &Team) -> (Vec<String>, Vec<String>) {
        (
            self.left_rows.iter().map(|&r| team.row_name(r)).collect(),
            self.right_rows.iter().map(|&r| team.row_name(r)).collect(),
        )
    }

    /// Re-expresses the certificate against `target`, whose rows are a
    /// permutation of `source`'s (`perm[i]` = index in `target` of source row `i`).
    pub fn remap(&self, perm: &[usize]) -> Self {
        Self::new(
            self.left_rows.iter().map(|&r| perm[r]).collect(),
            self.right_rows.iter().map(|&r| perm[r]).collect(),
        )
    }
}

/// Checks that `c` covers `team` and each side satisfies its atom.
pub fn verify_split(team: &Team, c: &SplitCertificate, f: &DisjunctionFormula) -> Result<bool> {
    let n = team.len();
    if let Some(&bad) = c.left_rows.iter().chain(&c.right_rows).find(|&&r| r >= n) {
        return Err(Error::InvalidCertificate(format!(
            "row {bad} does not exist (team has {n} rows)"
        )));
    }
    let mut covered = vec![false; n];
    for &r in c.left_rows.iter().chain(&c.right_rows) {
        covered[r] = true;
    }
    if covered.iter().any(|&b| !b) {
        return Ok(false);
    }
    let left = BoundAtom::bind(team, &f.left).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    let right = BoundAtom::bind(team, &f.right).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    Ok(left.holds_on(team, c.left_rows.iter().copied()) && right.holds_on(team, c.right_rows.iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn gt_team() -> Team {
        Team::from_labelled_rows(&["x", "y"], 1, &[["0", "0h"], ["0", "1h"], ["1", "0h"], ["1", "1h"]]).unwrap()
    }

    #[test]
    fn gt_split_verifies() {
        let t = gt_team();
        let f = parse_formula("dep(x,y) | dep(y,x)").unwrap();
        // s1,s4 | s2,s3
        let c = SplitCertificate::new(vec![0, 3], vec![1, 2]);
        assert!(verify_split(&t, &c, &f).unwrap());
        assert_eq!(c.named(&t), (vec!["s1".into(), "s4".into()], vec!["s2".into(), "s3".into()]));
        let bad = SplitCertificate::new(vec![0, 1], vec![2, 3]);
        assert!(!verify_split(&t, &bad, &f).unwrap());
    }

    #[test]
    fn uncovered_row_fails() {
        let t = gt_team();
        let f = parse_formula("dep(x,y) | dep(y,x)").unwrap();
        assert!(!verify_split(&t, &SplitCertificate::new(vec![0], vec![1, 2]), &f).unwrap());
    }

    #[test]
    fn dangling_reference_is_error() {
        let t = gt_team();
        let f = parse_formula("dep(x,y) | dep(y,x)").unwrap();
        let c = SplitCertificate::new(vec![0, 9], vec![1, 2, 3]);
        assert!(matches!(verify_split(&t, &c, &f), Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn everything_on_both_sides_equals_atom() {
        let t = gt_team();
        let f = parse_formula("dep(x,y) | dep(x,y)").unwrap();
        let all: Vec<usize> = (0..4).collect();
        assert!(!verify_split(&t, &SplitCertificate::new(all.clone(), all), &f).unwrap());
    }
}
