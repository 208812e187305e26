//! Places a disjunction of two dependence atoms in the complexity trichotomy,
//! records its coherence level, and picks an engine.
//!
//! | pattern                      | complexity  | coherence |
//! |------------------------------|-------------|-----------|
//! | `dep(x,y) ∨ dep(z,u)`        | NL-complete | incoherent|
//! | `dep(x,z) ∨ dep(y,z)`        | NL-complete | incoherent|
//! | `dep(x,y) ∨ dep(y,z)`        | NL-complete | incoherent|
//! | `dep(x,y) ∨ dep(y,x)`        | L-complete  | incoherent|
//! | `dep(x,y) ∨ dep(x,z)`        | FO          | 4         |
//! | `dep(x,y) ∨ dep(x,y)`        | FO          | 3         |
//!
//! Nested determiner sets are FO. After fixing the shared determiners such a
//! formula behaves like `dep(z) ∨ dep(ȳ,u)`, whose level is 3 when the atoms
//! coincide, 4 when `ȳ` is empty or contains `z`, and 6 otherwise. The
//! published level for that last family is 4, but six-row critical teams such
//! as
//!
//! ```text
//!  x y z
//!  1 1 1   1 2 1   2 1 2   2 3 1   3 2 2   3 3 2
//! ```
//!
//! (for `dep(x) ∨ dep(y,z)`) refute 5-coherence; the classification carries
//! the published value in `revised_from`. Incomparable determiner sets are
//! NL-complete.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engines::brute::check_bruteforce_with_cap;
use crate::engines::coherent::check_coherent_case;
use crate::engines::graph::check_mutual_unary;
use crate::engines::twosat::check_via_2sat;
use crate::engines::{EngineKind, Verdict};
use crate::error::{Error, Result};
use crate::formula::{DependenceAtom, DisjunctionFormula};
use crate::team::Team;
use crate::value::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstancyMixKind {
    /// `dep(x) ∨ dep(y,z)`
    Disjoint,
    /// `dep(x) ∨ dep(x,y)`
    OnDeterminer,
    /// `dep(y) ∨ dep(x,y)`
    OnTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaPattern {
    DisjointUnary,
    SharedTargetUnary,
    ChainUnary,
    MutualUnary,
    SameSourceUnary,
    IdenticalAtoms,
    ConstancyPair,
    ConstancyMix(ConstancyMixKind),
    HigherArityIncomparable,
    HigherArityContained,
    Unsupported,
}

impl FormulaPattern {
    pub const ALL: [FormulaPattern; 13] = [
        FormulaPattern::DisjointUnary,
        FormulaPattern::SharedTargetUnary,
        FormulaPattern::ChainUnary,
        FormulaPattern::MutualUnary,
        FormulaPattern::SameSourceUnary,
        FormulaPattern::IdenticalAtoms,
        FormulaPattern::ConstancyPair,
        FormulaPattern::ConstancyMix(ConstancyMixKind::Disjoint),
        FormulaPattern::ConstancyMix(ConstancyMixKind::OnDeterminer),
        FormulaPattern::ConstancyMix(ConstancyMixKind::OnTarget),
        FormulaPattern::HigherArityIncomparable,
        FormulaPattern::HigherArityContained,
        FormulaPattern::Unsupported,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaPattern::DisjointUnary => "disjoint",
            FormulaPattern::SharedTargetUnary => "shared-target",
            FormulaPattern::ChainUnary => "chain",
            FormulaPattern::MutualUnary => "mutual",
            FormulaPattern::SameSourceUnary => "same-source",
            FormulaPattern::IdenticalAtoms => "identical",
            FormulaPattern::ConstancyPair => "constancy-pair",
            FormulaPattern::ConstancyMix(ConstancyMixKind::Disjoint) => "constancy-mix-b",
            FormulaPattern::ConstancyMix(ConstancyMixKind::OnDeterminer) => "constancy-mix-c",
            FormulaPattern::ConstancyMix(ConstancyMixKind::OnTarget) => "constancy-mix-d",
            FormulaPattern::HigherArityIncomparable => "higher-arity-incomparable",
            FormulaPattern::HigherArityContained => "higher-arity-contained",
            FormulaPattern::Unsupported => "unsupported",
        }
    }

    /// A representative formula over fresh variables.
    pub fn example_formula(self) -> DisjunctionFormula {
        let text = match self {
            FormulaPattern::DisjointUnary => "dep(x,y) | dep(z,w)",
            FormulaPattern::SharedTargetUnary => "dep(x,z) | dep(y,z)",
            FormulaPattern::ChainUnary => "dep(x,y) | dep(y,z)",
            FormulaPattern::MutualUnary => "dep(x,y) | dep(y,x)",
            FormulaPattern::SameSourceUnary => "dep(x,y) | dep(x,z)",
            FormulaPattern::IdenticalAtoms => "dep(x,y) | dep(x,y)",
            FormulaPattern::ConstancyPair => "dep(y) | dep(z)",
            FormulaPattern::ConstancyMix(ConstancyMixKind::Disjoint) => "dep(x) | dep(y,z)",
            FormulaPattern::ConstancyMix(ConstancyMixKind::OnDeterminer) => "dep(x) | dep(x,y)",
            FormulaPattern::ConstancyMix(ConstancyMixKind::OnTarget) => "dep(y) | dep(x,y)",
            FormulaPattern::HigherArityIncomparable => "dep(x,y,z) | dep(y,w,z)",
            FormulaPattern::HigherArityContained => "dep(x,z) | dep(x,y,w)",
            FormulaPattern::Unsupported => "dep(x,y,z) | dep(z,w,u)",
        };
        text.parse().expect("built-in formula parses")
    }
}

impl fmt::Display for FormulaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let alias = match s.as_str() {
            "same-source-unary" => "same-source",
            "shared-target-unary" => "shared-target",
            "chain-unary" => "chain",
            "mutual-unary" => "mutual",
            "disjoint-unary" => "disjoint",
            "identical-atoms" => "identical",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|p| p.name() == alias)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown pattern `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Complexity {
    #[serde(rename = "NL-complete")]
    NlComplete,
    #[serde(rename = "L-complete")]
    LComplete,
    #[serde(rename = "FO-definable")]
    FoDefinable,
    #[serde(rename = "unknown")]
    Unknown,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::NlComplete => "NL-complete",
            Complexity::LComplete => "L-complete",
            Complexity::FoDefinable => "FO-definable",
            Complexity::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coherence {
    Level(usize),
    Incoherent,
    Unknown,
}

impl fmt::Display for Coherence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coherence::Level(k) => write!(f, "coherence level {k}"),
            Coherence::Incoherent => f.write_str("incoherent"),
            Coherence::Unknown => f.write_str("coherence unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub pattern: FormulaPattern,
    pub complexity: Complexity,
    pub coherence: Coherence,
    pub engine: EngineKind,
    /// The formula matched the pattern only after swapping the disjuncts.
    pub mirrored: bool,
    /// The coherence level was established by search rather than taken from
    /// the published classification.
    pub extension: bool,
    /// Published coherence level that search and proof showed too small.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revised_from: Option<usize>,
}

impl Classification {
    fn new(pattern: FormulaPattern, complexity: Complexity, coherence: Coherence) -> Self {
        let engine = match (complexity, coherence) {
            (Complexity::LComplete, _) => EngineKind::Graph,
            (_, Coherence::Level(k)) => EngineKind::Coherent { k },
            _ => EngineKind::TwoSat,
        };
        Self {
            pattern,
            complexity,
            coherence,
            engine,
            mirrored: false,
            extension: false,
            revised_from: None,
        }
    }

    fn mirrored(mut self, yes: bool) -> Self {
        self.mirrored = yes;
        self
    }

    fn extension(mut self) -> Self {
        self.extension = true;
        self
    }

    fn revised_from(mut self, published: usize) -> Self {
        self.revised_from = Some(published);
        self
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}, engine={}", self.complexity, self.coherence, self.engine)?;
        if self.extension {
            f.write_str(" [derived extension]")?;
        }
        if let Some(k) = self.revised_from {
            write!(f, " [published level {k} revised]")?;
        }
        Ok(())
    }
}

fn nl(pattern: FormulaPattern) -> Classification {
    Classification::new(pattern, Complexity::NlComplete, Coherence::Incoherent)
}

fn fo(pattern: FormulaPattern, level: usize) -> Classification {
    Classification::new(pattern, Complexity::FoDefinable, Coherence::Level(level))
}

/// Classifies `f`. Never fails: shapes outside the known classification come back
/// as [`FormulaPattern::Unsupported`] with the 2SAT engine.
pub fn classify(f: &DisjunctionFormula) -> Classification {
    let (l, r) = (&f.left, &f.right);
    if l.arity() <= 1 && r.arity() <= 1 {
        classify_low_arity(l, r)
    } else {
        classify_higher_arity(l, r)
    }
}

fn classify_low_arity(l: &DependenceAtom, r: &DependenceAtom) -> Classification {
    use FormulaPattern::*;
    match (l.determiners(), r.determiners()) {
        ([a], [c]) => {
            let (b, d) = (l.target(), r.target());
            if a == c && b == d {
                fo(IdenticalAtoms, 3)
            } else if a == d && b == c {
                Classification::new(MutualUnary, Complexity::LComplete, Coherence::Incoherent)
            } else if a == c {
                fo(SameSourceUnary, 4)
            } else if b == d {
                nl(SharedTargetUnary)
            } else if b == c {
                nl(ChainUnary)
            } else if a == d {
                nl(ChainUnary).mirrored(true)
            } else {
                nl(DisjointUnary)
            }
        }
        ([], []) => {
            if l.target() == r.target() {
                fo(IdenticalAtoms, 3).extension()
            } else {
                fo(ConstancyPair, 4)
            }
        }
        ([], [_]) => constancy_mix(mix_kind(l.target(), r)),
        ([_], []) => constancy_mix(mix_kind(r.target(), l)).mirrored(true),
        _ => unreachable!("arity ≤ 1 on both sides"),
    }
}

fn constancy_mix(kind: ConstancyMixKind) -> Classification {
    let c = FormulaPattern::ConstancyMix(kind);
    match kind {
        ConstancyMixKind::OnDeterminer => fo(c, 4),
        _ => fo(c, 6).revised_from(4),
    }
}

fn mix_kind(constant: &str, other: &DependenceAtom) -> ConstancyMixKind {
    if other.determiners()[0] == constant {
        ConstancyMixKind::OnDeterminer
    } else if other.target() == constant {
        ConstancyMixKind::OnTarget
    } else {
        ConstancyMixKind::Disjoint
    }
}

fn classify_higher_arity(l: &DependenceAtom, r: &DependenceAtom) -> Classification {
    let d1: HashSet<&str> = l.determiners().iter().map(String::as_str).collect();
    let d2: HashSet<&str> = r.determiners().iter().map(String::as_str).collect();
    let (sub, sup) = (d1.is_subset(&d2), d2.is_subset(&d1));
    if !sub && !sup {
        if d2.contains(l.target()) || d1.contains(r.target()) {
            return Classification::new(FormulaPattern::Unsupported, Complexity::Unknown, Coherence::Unknown);
        }
        return nl(FormulaPattern::HigherArityIncomparable);
    }
    // Orient so the left determiners are the smaller set.
    let ((small, ds), (big, db)) = if sub { ((l, &d1), (r, &d2)) } else { ((r, &d2), (l, &d1)) };
    let c = if ds.len() == db.len() {
        if small.target() == big.target() {
            fo(FormulaPattern::HigherArityContained, 3).extension()
        } else {
            fo(FormulaPattern::HigherArityContained, 4)
        }
    } else if db.contains(small.target()) {
        // Behaves like dep(x) ∨ dep(x,y) within each class of the smaller set.
        fo(FormulaPattern::HigherArityContained, 4).extension()
    } else {
        fo(FormulaPattern::HigherArityContained, 6).revised_from(4)
    };
    c.mirrored(!sub)
}

/// Replaces each multi-variable determiner set by one fresh column holding
/// tuples of the original values. The result keeps every original column and
/// row order, so row indices (and certificates) carry over unchanged.
///
/// Nested sets `D1 ⊆ D2` become `dep(x',z) ∨ dep(x',y',u)` with `x'` the tuple
/// of `D1` and `y'` the tuple of `D2∖D1`; equal sets share one tuple.
pub fn normalize_higher_arity(
    f: &DisjunctionFormula,
    team: &Team,
) -> Result<(DisjunctionFormula, Team)> {
    let (l, r) = (&f.left, &f.right);
    if l.arity() <= 1 && r.arity() <= 1 {
        log::warn!("normalize_higher_arity called on {f}, which has no multi-variable determiner set");
        return Ok((f.clone(), team.clone()));
    }
    for v in f.free_variables() {
        team.column_index(v).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    }
    let d1: Vec<&str> = l.determiners().iter().map(String::as_str).collect();
    let d2: Vec<&str> = r.determiners().iter().map(String::as_str).collect();
    let s1: HashSet<&str> = d1.iter().copied().collect();
    let s2: HashSet<&str> = d2.iter().copied().collect();

    let mut team = team.clone();
    let mut taken: HashSet<String> = team.vars().iter().cloned().collect();
    taken.extend(f.free_variables().into_iter().map(String::from));
    let mut tuple = |team: &mut Team, vars: &[&str]| -> Result<Vec<String>> {
        if vars.len() <= 1 {
            return Ok(vars.iter().map(|v| v.to_string()).collect());
        }
        let mut name = vars.join("_");
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        *team = tuple_column(team, vars, &name)?;
        Ok(vec![name])
    };

    let (left_dets, right_dets) = if s1 == s2 {
        let shared = tuple(&mut team, &d1)?;
        (shared.clone(), shared)
    } else if s1.is_subset(&s2) {
        let base = tuple(&mut team, &d1)?;
        let extra: Vec<&str> = d2.iter().copied().filter(|v| !s1.contains(v)).collect();
        let mut right = base.clone();
        right.extend(tuple(&mut team, &extra)?);
        (base, right)
    } else if s2.is_subset(&s1) {
        let base = tuple(&mut team, &d2)?;
        let extra: Vec<&str> = d1.iter().copied().filter(|v| !s2.contains(v)).collect();
        let mut left = base.clone();
        left.extend(tuple(&mut team, &extra)?);
        (left, base)
    } else {
        (tuple(&mut team, &d1)?, tuple(&mut team, &d2)?)
    };
    let nf = DisjunctionFormula::new(
        DependenceAtom::new(left_dets, l.target())?,
        DependenceAtom::new(right_dets, r.target())?,
    );
    Ok((nf, team))
}

fn tuple_column(team: &Team, vars: &[&str], name: &str) -> Result<Team> {
    let cols = vars.iter().map(|v| team.column_index(v)).collect::<Result<Vec<_>>>()?;
    let mut parts: Vec<Symbol> = Vec::with_capacity(cols.len());
    team.with_derived_column(name, |row, pool| {
        parts.clear();
        parts.extend(cols.iter().map(|&c| row[c]));
        pool.intern_tuple(&parts)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineSelection {
    #[default]
    Auto,
    Brute,
    #[serde(rename = "2sat")]
    TwoSat,
    Graph,
    Coherent,
}

impl FromStr for EngineSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => EngineSelection::Auto,
            "brute" => EngineSelection::Brute,
            "2sat" => EngineSelection::TwoSat,
            "graph" => EngineSelection::Graph,
            "coherent" => EngineSelection::Coherent,
            other => return Err(Error::InvalidParameter(format!("unknown engine `{other}`"))),
        })
    }
}

impl fmt::Display for EngineSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineSelection::Auto => "auto",
            EngineSelection::Brute => "brute",
            EngineSelection::TwoSat => "2sat",
            EngineSelection::Graph => "graph",
            EngineSelection::Coherent => "coherent",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct DispatchOptions {
    pub engine: EngineSelection,
    /// Row cap for the brute-force engine; `None` reads the environment.
    pub brute_cap: Option<usize>,
}

/// Classify, normalise higher-arity determiners, run the selected engine.
pub fn dispatch(team: &Team, f: &DisjunctionFormula) -> Result<Verdict> {
    dispatch_with(team, f, &DispatchOptions::default())
}

pub fn dispatch_with(team: &Team, f: &DisjunctionFormula, opts: &DispatchOptions) -> Result<Verdict> {
    let class = classify(f);
    let normalized;
    let (tf, tt) = if f.left.arity() > 1 || f.right.arity() > 1 {
        normalized = normalize_higher_arity(f, team)?;
        (&normalized.0, &normalized.1)
    } else {
        (f, team)
    };
    // The level belongs to `f`; tupling can hide that a target is among the
    // other atom's determiners, so the coherent engine sees the original.
    let coherent = |k: Option<usize>| -> Result<Verdict> {
        match (k, class.coherence) {
            (Some(k), _) | (None, Coherence::Level(k)) => check_coherent_case(team, f, k),
            _ => Err(Error::Classification(format!("{f} is not known to be coherent"))),
        }
    };
    let mut verdict = match opts.engine {
        EngineSelection::Auto => match class.engine {
            EngineKind::Graph => check_mutual_unary(tt, tf)?,
            EngineKind::Coherent { k } => coherent(Some(k))?,
            EngineKind::TwoSat | EngineKind::Brute => check_via_2sat(tt, tf)?,
        },
        EngineSelection::Brute => {
            let cap = match opts.brute_cap {
                Some(c) => c,
                None => crate::engines::brute::default_brute_cap()?,
            };
            check_bruteforce_with_cap(tt, tf, cap)?
        }
        EngineSelection::TwoSat => check_via_2sat(tt, tf)?,
        EngineSelection::Graph => check_mutual_unary(tt, tf)?,
        EngineSelection::Coherent => coherent(None)?,
    };
    verdict.stats.pattern = Some(class.pattern.name().to_string());
    Ok(verdict)
}
