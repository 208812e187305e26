//! Undirected forest accessibility → mutual formula. The team satisfies
//! `dep(x,y) ∨ dep(y,x)` iff `u` and `v` lie in different trees.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::engines::graph::Dsu;
use crate::error::{Error, Result};
use crate::team::{Team, TeamBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UfaInstance {
    /// Optional extra (isolated) nodes; edge endpoints and `u`, `v` are
    /// always nodes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub u: String,
    pub v: String,
}

impl UfaInstance {
    pub fn node_set(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let all = self
            .nodes
            .iter()
            .chain(self.edges.iter().flat_map(|(a, b)| [a, b]))
            .chain([&self.u, &self.v]);
        for n in all {
            if seen.insert(n.as_str()) {
                out.push(n.as_str());
            }
        }
        out
    }

    /// Checks `u ≠ v` and that the edges form a forest (no loops, no repeated
    /// edges, no cycles).
    pub fn validate(&self) -> Result<()> {
        if self.u == self.v {
            return Err(Error::InvalidInstance(format!("u and v are both `{}`", self.u)));
        }
        let nodes = self.node_set();
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut dsu = Dsu::new(nodes.len());
        for (a, b) in &self.edges {
            if !dsu.union(index[a.as_str()], index[b.as_str()]) {
                return Err(Error::InvalidInstance(format!(
                    "edge {{{a},{b}}} closes a cycle; the graph must be a forest"
                )));
            }
        }
        Ok(())
    }

    /// Whether `u` and `v` are joined by a path.
    pub fn connected(&self) -> bool {
        let nodes = self.node_set();
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut dsu = Dsu::new(nodes.len());
        for (a, b) in &self.edges {
            dsu.union(index[a.as_str()], index[b.as_str()]);
        }
        dsu.find(index[self.u.as_str()]) == dsu.find(index[self.v.as_str()])
    }
}

fn fresh(base: &str, taken: &HashSet<&str>) -> String {
    let mut name = base.to_string();
    while taken.contains(name.as_str()) {
        name.push('\'');
    }
    name
}

/// Rows `(a,b), (b,a)` for every edge, plus `(⊤,u),(u,⊤),(⊤,v),(v,⊤)` and the
/// same with `⊥`, where `⊤`, `⊥` are values outside the node set.
pub fn ufa_complement_to_team(g: &UfaInstance) -> Result<Team> {
    g.validate()?;
    let taken: HashSet<&str> = g.node_set().into_iter().collect();
    let top = fresh("⊤", &taken);
    let bot = fresh("⊥", &taken);
    let mut b = TeamBuilder::new(["x", "y"])?;
    for (p, q) in &g.edges {
        b.push_row([p, q])?;
        b.push_row([q, p])?;
    }
    for special in [&top, &bot] {
        for end in [&g.u, &g.v] {
            b.push_row([special, end])?;
            b.push_row([end, special])?;
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::graph::check_mutual_unary;
    use crate::formula::parse_formula;

    fn forest(edges: &[(&str, &str)]) -> UfaInstance {
        UfaInstance {
            nodes: vec![],
            edges: edges.iter().map(|&(a, b)| (a.into(), b.into())).collect(),
            u: "u".into(),
            v: "v".into(),
        }
    }

    #[test]
    fn sample_forest() {
        let f = parse_formula("dep(x,y) | dep(y,x)").unwrap();
        let g = forest(&[("a", "b"), ("b", "u"), ("u", "c"), ("d", "v")]);
        let t = ufa_complement_to_team(&g).unwrap();
        assert_eq!(t.len(), 16);
        assert!(check_mutual_unary(&t, &f).unwrap().satisfied);

        let mut joined = g.clone();
        joined.edges.push(("c".into(), "d".into()));
        let t = ufa_complement_to_team(&joined).unwrap();
        assert_eq!(t.len(), 18);
        assert!(!check_mutual_unary(&t, &f).unwrap().satisfied);
    }

    #[test]
    fn isolated_endpoints() {
        let f = parse_formula("dep(x,y) | dep(y,x)").unwrap();
        let t = ufa_complement_to_team(&forest(&[])).unwrap();
        assert_eq!(t.len(), 8);
        assert!(check_mutual_unary(&t, &f).unwrap().satisfied);
    }

    #[test]
    fn invalid_instances() {
        assert!(forest(&[("a", "b"), ("b", "c"), ("c", "a")]).validate().is_err());
        assert!(forest(&[("a", "a")]).validate().is_err());
        assert!(forest(&[("a", "b"), ("b", "a")]).validate().is_err());
        let mut g = forest(&[]);
        g.v = "u".into();
        assert!(matches!(ufa_complement_to_team(&g), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn special_values_avoid_node_names() {
        let g = UfaInstance {
            nodes: vec!["⊤".into()],
            edges: vec![],
            u: "u".into(),
            v: "v".into(),
        };
        let t = ufa_complement_to_team(&g).unwrap();
        assert!(t.column_range_text("x").unwrap().contains(&"⊤'".to_string()));
    }
}
