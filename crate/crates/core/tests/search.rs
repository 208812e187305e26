//! Bounded coherence search against the classifier, and the critical teams it
//! reports against the string oracle.

mod common;

use common::*;
use depsplit::coherence::search::{search_coherence_level, LevelEstimate, DEFAULT_MAX_RANGE, DEFAULT_MAX_ROWS};
use depsplit::{classify, Coherence, Team};

fn search(text: &str) -> (LevelEstimate, Option<Team>) {
    let r = search_coherence_level(&formula(text), DEFAULT_MAX_ROWS, DEFAULT_MAX_RANGE).unwrap();
    (r.estimate, r.witness)
}

/// Fails, and every subteam one row smaller passes.
fn critical(team: &Team, text: &str) -> bool {
    let f = formula(text);
    let p = Plain::of(team);
    !p.satisfies(&f) && subsets(p.len(), p.len() - 1).iter().all(|s| p.splits(&f, s))
}

#[test]
fn classifier_levels_match_search() {
    for text in [
        "dep(x,y) | dep(x,y)",
        "dep(x,y) | dep(x,z)",
        "dep(y) | dep(z)",
        "dep(x) | dep(x,y)",
        "dep(x) | dep(y,z)",
        "dep(y) | dep(x,y)",
        "dep(x,y) | dep(y)",
        "dep(x,z) | dep(x,y,u)",
        "dep(x,z) | dep(x,y,z)",
        "dep(x,y,z) | dep(x,y,u)",
        "dep(x,y) | dep(x,y,z)",
        "dep(x) | dep(x,y,u)",
        "dep(z,u,x) | dep(z)",
    ] {
        let (estimate, witness) = search(text);
        let LevelEstimate::Level(k) = estimate else {
            panic!("{text}: {estimate}");
        };
        assert_eq!(classify(&formula(text)).coherence, Coherence::Level(k), "{text}");
        let w = witness.unwrap();
        assert_eq!(w.len(), k, "{text}");
        assert!(critical(&w, text), "{text}");
    }
}

#[test]
fn revised_levels_are_flagged() {
    for text in ["dep(x) | dep(y,z)", "dep(y) | dep(x,y)", "dep(x,z) | dep(x,y,u)"] {
        let c = classify(&formula(text));
        assert_eq!(c.coherence, Coherence::Level(6), "{text}");
        assert_eq!(c.revised_from, Some(4), "{text}");
    }
    for text in ["dep(x,y) | dep(x,z)", "dep(x) | dep(x,y)", "dep(y) | dep(z)"] {
        assert_eq!(classify(&formula(text)).revised_from, None, "{text}");
    }
}

#[test]
fn incoherent_patterns_have_critical_teams_at_the_bound() {
    for text in ["dep(x,y) | dep(y,x)", "dep(x,y) | dep(y,z)", "dep(x,z) | dep(y,z)"] {
        let (estimate, witness) = search(text);
        assert_eq!(estimate, LevelEstimate::IncoherentUpTo(DEFAULT_MAX_ROWS), "{text}");
        assert_eq!(classify(&formula(text)).coherence, Coherence::Incoherent);
        assert!(critical(&witness.unwrap(), text), "{text}");
    }
}

#[test]
fn disjoint_atoms_incoherent_up_to_six() {
    let f = formula("dep(x,y) | dep(z,u)");
    let r = search_coherence_level(&f, 6, DEFAULT_MAX_RANGE).unwrap();
    assert_eq!(r.estimate, LevelEstimate::IncoherentUpTo(6));
    assert!(critical(r.witness.as_ref().unwrap(), "dep(x,y) | dep(z,u)"));
}

#[test]
fn mutual_has_no_five_row_critical_team() {
    let r = search_coherence_level(&formula("dep(x,y) | dep(y,x)"), DEFAULT_MAX_ROWS, DEFAULT_MAX_RANGE).unwrap();
    assert_eq!(r.critical_sizes, vec![6, 7]);
}
