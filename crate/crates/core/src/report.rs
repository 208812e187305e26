//! Machine-readable record of one check: what was decided, by which engine,
//! how long each phase took, and a certificate that can be re-verified.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certificate::{verify_split, SplitCertificate};
use crate::classifier::{classify, dispatch_with, Classification, DispatchOptions};
use crate::engines::twosat::check_via_2sat;
use crate::engines::{EngineKind, EngineStats, Verdict};
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::Team;

pub const SCHEMA_VERSION: u32 = 1;

/// SHA-256 over the variable names and rows in team order, fields separated
/// by `0x1f` and records by `0x1e`.
pub fn team_digest(team: &Team) -> String {
    let mut h = Sha256::new();
    h.update(team.vars().join("\u{1f}").as_bytes());
    for r in 0..team.len() {
        h.update([0x1e]);
        h.update(team.row_text(r).join("\u{1f}").as_bytes());
    }
    let mut out = String::with_capacity(64);
    for b in h.finalize().iter() {
        write!(out, "{b:02x}").expect("writing to a string");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputInfo {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<String>,
    pub sha256: String,
    pub vars: Vec<String>,
    pub rows: usize,
    pub duplicates_removed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub left_rows: Vec<usize>,
    pub right_rows: Vec<usize>,
    pub left_names: Vec<String>,
    pub right_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub phase: String,
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub engine: EngineKind,
    pub satisfied: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub input: InputInfo,
    pub formula: String,
    pub classification: Classification,
    pub satisfied: bool,
    pub engine: EngineKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateReport>,
    pub stats: EngineStats,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_check: Option<CrossCheck>,
    pub timings: Vec<Timing>,
}

struct Clock {
    timings: Vec<Timing>,
    start: Instant,
}

impl Clock {
    fn new() -> Self {
        Self {
            timings: Vec::new(),
            start: Instant::now(),
        }
    }

    fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        self.timings.push(Timing {
            phase: phase.to_string(),
            micros: (now - self.start).as_micros() as u64,
        });
        self.start = now;
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub dispatch: DispatchOptions,
    /// Also run the 2SAT engine and fail on disagreement.
    pub cross_check: bool,
    pub source: Option<String>,
}

/// Classifies, decides, verifies the certificate, and optionally cross-checks
/// against 2SAT. An invalid certificate or a disagreement is an error.
pub fn check_with_report(team: &Team, f: &DisjunctionFormula, opts: &CheckOptions) -> Result<RunReport> {
    let mut clock = Clock::new();
    let classification = classify(f);
    clock.lap("classify");
    let verdict = dispatch_with(team, f, &opts.dispatch)?;
    clock.lap("decide");
    if let Some(c) = &verdict.certificate {
        if !verify_split(team, c, f)? {
            return Err(Error::EngineDisagreement(format!(
                "{} produced a certificate that does not verify",
                verdict.engine
            )));
        }
        clock.lap("verify");
    }
    let cross_check = if opts.cross_check {
        let other = check_via_2sat(team, f)?;
        clock.lap("cross-check");
        if other.satisfied != verdict.satisfied {
            return Err(Error::EngineDisagreement(format!(
                "{} says {}, 2sat says {}",
                verdict.engine, verdict.satisfied, other.satisfied
            )));
        }
        Some(CrossCheck {
            engine: other.engine,
            satisfied: other.satisfied,
            agrees: true,
        })
    } else {
        None
    };
    let mut report = RunReport::new(team, f, classification, verdict, clock.timings);
    report.input.source = opts.source.clone();
    report.cross_check = cross_check;
    Ok(report)
}

impl RunReport {
    pub fn new(
        team: &Team,
        f: &DisjunctionFormula,
        classification: Classification,
        verdict: Verdict,
        timings: Vec<Timing>,
    ) -> Self {
        let certificate = verdict.certificate.as_ref().map(|c| {
            let (left_names, right_names) = c.named(team);
            CertificateReport {
                left_rows: c.left_rows.clone(),
                right_rows: c.right_rows.clone(),
                left_names,
                right_names,
            }
        });
        Self {
            schema_version: SCHEMA_VERSION,
            input: InputInfo {
                source: None,
                sha256: team_digest(team),
                vars: team.vars().to_vec(),
                rows: team.len(),
                duplicates_removed: team.duplicates_removed(),
            },
            formula: f.to_string(),
            classification,
            satisfied: verdict.satisfied,
            engine: verdict.engine,
            certificate,
            stats: verdict.stats,
            cross_check: None,
            timings,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: RunReport = serde_json::from_str(text)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!(
                "report schema {} is not supported (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        Ok(r)
    }

    /// Checks that `team` is the reported input and that the certificate, if
    /// any, is valid for it.
    pub fn reverify(&self, team: &Team) -> Result<bool> {
        if team_digest(team) != self.input.sha256 {
            return Ok(false);
        }
        let f: DisjunctionFormula = self.formula.parse()?;
        match &self.certificate {
            Some(c) => verify_split(team, &SplitCertificate::new(c.left_rows.clone(), c.right_rows.clone()), &f),
            None => Ok(!self.satisfied),
        }
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "formula:  {}", self.formula);
        let _ = writeln!(
            s,
            "team:     {} rows over ({}), sha256 {}",
            self.input.rows,
            self.input.vars.join(","),
            &self.input.sha256[..12]
        );
        if self.input.duplicates_removed > 0 {
            let _ = writeln!(s, "          {} duplicate rows dropped", self.input.duplicates_removed);
        }
        let _ = writeln!(s, "class:    {}", self.classification);
        let _ = writeln!(
            s,
            "verdict:  {} (engine {})",
            if self.satisfied { "satisfied" } else { "not satisfied" },
            self.engine
        );
        if let Some(c) = &self.certificate {
            let (l, r) = self.formula.split_once('|').unwrap_or((&self.formula, ""));
            let _ = writeln!(s, "left  {}: {}", l.trim(), c.left_names.join(", "));
            let _ = writeln!(s, "right {}: {}", r.trim(), c.right_names.join(", "));
        }
        if let Some(x) = &self.cross_check {
            let _ = writeln!(s, "cross-check: {} agrees", x.engine);
        }
        let phases: Vec<String> = self.timings.iter().map(|t| format!("{} {:.3}ms", t.phase, t.micros as f64 / 1e3)).collect();
        let _ = writeln!(s, "timings:  {}", phases.join(", "));
        s
    }
}
