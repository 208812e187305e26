//! Model checking for disjunctions of two dependence atoms under team
//! semantics.
//!
//! A [`Team`] is a relation; `dep(ȳ,z) ∨ dep(ū,v)` holds on it iff the rows
//! can be covered by two parts, one functional from `ȳ` to `z` and the other
//! from `ū` to `v`. [`classify`] places a formula in the
//! NL-complete / L-complete / first-order trichotomy and picks an engine;
//! [`dispatch`] runs it and returns a [`Verdict`] whose certificate can be
//! re-checked with [`verify_split`].

pub mod bench;
pub mod certificate;
pub mod classifier;
pub mod coherence;
pub mod engines;
pub mod error;
pub mod formula;
pub mod generate;
pub mod io;
pub mod reductions;
pub mod report;
pub mod team;
pub mod value;

pub use certificate::{verify_split, SplitCertificate};
pub use classifier::{
    classify, dispatch, dispatch_with, normalize_higher_arity, Classification, Coherence, Complexity,
    ConstancyMixKind, DispatchOptions, EngineSelection, FormulaPattern,
};
pub use engines::{
    brute::{check_bruteforce, check_bruteforce_with_cap, default_brute_cap},
    coherent::{check_coherent_case, check_coherent_naive},
    graph::{build_team_graph, check_mutual_unary, orient_components, size_bound_reject, TeamGraph},
    twosat::{check_via_2sat, reduce_to_2cnf, solve_2cnf, Lit, TwoCnf},
    EngineKind, EngineStats, Verdict,
};
pub use error::{Error, Result};
pub use formula::{parse_atom, parse_formula, DependenceAtom, DisjunctionFormula};
pub use team::{satisfies_atom, Team, TeamBuilder};
pub use value::{OwnedValue, Symbol, ValuePool};
