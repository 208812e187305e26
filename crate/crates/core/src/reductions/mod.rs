//! Instance translators from the hardness proofs: 2SAT and forest
//! accessibility into teams, and the mtdf-2SAT ⇄ mutual-formula equivalence.

pub mod cnf;
pub mod mtdf;
pub mod twosat_teams;
pub mod ufa;

pub use cnf::CnfInstance;
pub use mtdf::{mtdf_facts, mtdf_to_team, solve_mtdf, team_to_mtdf, validate_mtdf, MtdfInstance, MtdfSolution};
pub use twosat_teams::{
    chain_formula, disjoint_formula, shared_target_formula, twosat_to_team_chain, twosat_to_team_disjoint,
    twosat_to_team_shared_target,
};
pub use ufa::{ufa_complement_to_team, UfaInstance};
