//! Decision procedures. Every engine returns a [`Verdict`]; a satisfied
//! verdict always carries a certificate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::certificate::SplitCertificate;

pub mod brute;
pub mod coherent;
pub mod graph;
pub mod twosat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum EngineKind {
    Brute,
    #[serde(rename = "2sat")]
    TwoSat,
    Graph,
    Coherent { k: usize },
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineKind::Brute => f.write_str("brute"),
            EngineKind::TwoSat => f.write_str("2sat"),
            EngineKind::Graph => f.write_str("graph"),
            EngineKind::Coherent { k } => write!(f, "coherent(k={k})"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clauses: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_scanned: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subteams_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_nodes: Option<u64>,
    /// Set when the size bound decided the instance before graph construction.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub size_bound_rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub satisfied: bool,
    pub certificate: Option<SplitCertificate>,
    pub engine: EngineKind,
    pub stats: EngineStats,
}

impl Verdict {
    pub(crate) fn sat(engine: EngineKind, cert: SplitCertificate, stats: EngineStats) -> Self {
        Self {
            satisfied: true,
            certificate: Some(cert),
            engine,
            stats,
        }
    }

    pub(crate) fn unsat(engine: EngineKind, stats: EngineStats) -> Self {
        Self {
            satisfied: false,
            certificate: None,
            engine,
            stats,
        }
    }
}
