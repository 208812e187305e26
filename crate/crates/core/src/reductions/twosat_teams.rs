//! 2SAT → team constructions behind the NL-hardness results. Each clause
//! contributes two rows; the target formula holds on the team iff the 2CNF is
//! satisfiable.
//!
//! Values live in separate namespaces so the constructions' disjointness
//! assumptions hold: propositions `p1, p2, …`, clauses `c1, c2, …`, and (for
//! the shared-target team) per-proposition truth values `1_k` / `0_k`.

use crate::engines::twosat::Lit;
use crate::error::Result;
use crate::formula::DisjunctionFormula;
use crate::team::{Team, TeamBuilder};

use super::cnf::CnfInstance;

fn prop(l: Lit) -> String {
    format!("p{}", l.var() + 1)
}

fn clause(i: usize) -> String {
    format!("c{}", i + 1)
}

fn bit(l: Lit) -> &'static str {
    if l.is_positive() {
        "1"
    } else {
        "0"
    }
}

/// Team over `x, y, z` for `dep(x,z) ∨ dep(y,z)`: literal over `p_k` in clause
/// `i` gives `(p_k, c_i, 1_k)` if positive, `(p_k, c_i, 0_k)` if negative.
/// Clauses `(ℓ ∨ ℓ)` are split first so no clause collapses to one row.
pub fn twosat_to_team_shared_target(theta: &CnfInstance) -> Result<Team> {
    let theta = theta.split_repeated_literals();
    let mut b = TeamBuilder::new(["x", "y", "z"])?;
    for (i, &(l1, l2)) in theta.clauses().iter().enumerate() {
        for l in [l1, l2] {
            b.push_row([prop(l), clause(i), format!("{}_{}", bit(l), l.var() + 1)])?;
        }
    }
    Ok(b.build())
}

/// Team over `x, y, z` for `dep(x,y) ∨ dep(y,z)`: rows `(c_i, p_k, 1|0)`.
pub fn twosat_to_team_chain(theta: &CnfInstance) -> Result<Team> {
    let theta = theta.split_repeated_literals();
    let mut b = TeamBuilder::new(["x", "y", "z"])?;
    for (i, &(l1, l2)) in theta.clauses().iter().enumerate() {
        for l in [l1, l2] {
            b.push_row([clause(i), prop(l), bit(l).to_string()])?;
        }
    }
    Ok(b.build())
}

/// Team over `x, y, z, w` for `dep(x,y) ∨ dep(z,w)`: rows `(p_k, 1|0, c_i, 0)`
/// for the first literal and `(…, c_i, 1)` for the second. The position
/// column keeps a repeated literal's two rows apart, so no preprocessing.
pub fn twosat_to_team_disjoint(theta: &CnfInstance) -> Result<Team> {
    let mut b = TeamBuilder::new(["x", "y", "z", "w"])?;
    for (i, &(l1, l2)) in theta.clauses().iter().enumerate() {
        b.push_row([prop(l1), bit(l1).to_string(), clause(i), "0".to_string()])?;
        b.push_row([prop(l2), bit(l2).to_string(), clause(i), "1".to_string()])?;
    }
    Ok(b.build())
}

pub fn shared_target_formula() -> DisjunctionFormula {
    "dep(x,z) | dep(y,z)".parse().expect("valid formula")
}

pub fn chain_formula() -> DisjunctionFormula {
    "dep(x,y) | dep(y,z)".parse().expect("valid formula")
}

pub fn disjoint_formula() -> DisjunctionFormula {
    "dep(x,y) | dep(z,w)".parse().expect("valid formula")
}
