//! The mutual case `dep(x,y) ∨ dep(y,x)`.
//!
//! Rows become edges of a bipartite graph between x-values and y-values. The
//! formula holds iff the edges can be oriented so every node has out-degree at
//! most one, iff every connected component has no more edges than nodes. The
//! orientation gives the split: an edge pointing from its x-value to its
//! y-value keeps `x ↦ y` functional, so that row goes to the `dep(x,y)` side.
//!
//! Components are counted with a union-find in near-linear time rather than
//! the repeated-reachability loop a logspace algorithm would use.


use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::certificate::SplitCertificate;
use crate::error::{Error, Result};
use crate::formula::DisjunctionFormula;
use crate::team::Team;
use crate::value::Symbol;

use super::{EngineKind, EngineStats, Verdict};

/// Which column a node's value came from. Tagging keeps a value that occurs
/// in both columns as two distinct nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    X,
    Y,
}

#[derive(Debug, Clone)]
pub struct TeamGraph {
    x: String,
    y: String,
    node_value: Vec<Symbol>,
    node_tag: Vec<Tag>,
    /// `(x-node, y-node)` per distinct restricted row.
    edges: Vec<(u32, u32)>,
    /// Original team row → edge.
    row_edge: Vec<u32>,
    /// Built on first use; the decision procedure never needs it.
    adjacency: OnceLock<Adjacency>,
}

#[derive(Debug, Clone)]
struct Adjacency {
    start: Vec<u32>,
    /// `(neighbour, edge)`, grouped by node, edge order within a node.
    entries: Vec<(u32, u32)>,
}

impl Adjacency {
    fn build(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut start = vec![0u32; n + 1];
        for &(a, b) in edges {
            start[a as usize + 1] += 1;
            start[b as usize + 1] += 1;
        }
        for v in 0..n {
            start[v + 1] += start[v];
        }
        let mut fill = start.clone();
        let mut entries = vec![(0u32, 0u32); start[n] as usize];
        for (e, &(a, b)) in edges.iter().enumerate() {
            entries[fill[a as usize] as usize] = (b, e as u32);
            fill[a as usize] += 1;
            entries[fill[b as usize] as usize] = (a, e as u32);
            fill[b as usize] += 1;
        }
        Self { start, entries }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCounts {
    pub nodes: usize,
    pub edges: usize,
}

impl TeamGraph {
    pub fn x(&self) -> &str {
        &self.x
    }

    pub fn y(&self) -> &str {
        &self.y
    }

    pub fn num_nodes(&self) -> usize {
        self.node_value.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, v: usize) -> (Symbol, Tag) {
        (self.node_value[v], self.node_tag[v])
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn row_edge(&self, row: usize) -> usize {
        self.row_edge[row] as usize
    }

    pub fn num_rows(&self) -> usize {
        self.row_edge.len()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let adj = self.adjacency();
        adj.entries[adj.start[v] as usize..adj.start[v + 1] as usize]
            .iter()
            .map(|&(w, e)| (w as usize, e as usize))
    }

    fn adjacency(&self) -> &Adjacency {
        self.adjacency
            .get_or_init(|| Adjacency::build(self.num_nodes(), &self.edges))
    }

    pub fn degree(&self, v: usize) -> usize {
        let adj = self.adjacency();
        (adj.start[v + 1] - adj.start[v]) as usize
    }

    /// Per-component node and edge counts, plus each node's component id.
    pub fn components(&self) -> (Vec<ComponentCounts>, Vec<u32>) {
        let n = self.num_nodes();
        let mut dsu = Dsu::new(n);
        for &(a, b) in &self.edges {
            dsu.union(a as usize, b as usize);
        }
        let mut id = vec![u32::MAX; n];
        let mut counts: Vec<ComponentCounts> = Vec::new();
        let mut node_comp = vec![0u32; n];
        for v in 0..n {
            let r = dsu.find(v);
            if id[r] == u32::MAX {
                id[r] = counts.len() as u32;
                counts.push(ComponentCounts { nodes: 0, edges: 0 });
            }
            node_comp[v] = id[r];
            counts[id[r] as usize].nodes += 1;
        }
        for &(a, _) in &self.edges {
            counts[node_comp[a as usize] as usize].edges += 1;
        }
        (counts, node_comp)
    }
}

/// Builds `G_T` over columns `x` and `y`. Node ids are assigned in order of
/// first appearance scanning rows, x-value before y-value.
pub fn build_team_graph(team: &Team, x: &str, y: &str) -> Result<TeamGraph> {
    if x == y {
        return Err(Error::InvalidParameter(format!("team graph needs two distinct columns, got `{x}` twice")));
    }
    let cx = team.column_index(x).map_err(|e| Error::DomainMismatch(e.to_string()))?;
    let cy = team.column_index(y).map_err(|e| Error::DomainMismatch(e.to_string()))?;

    // Symbols are dense indices into the pool, so a flat table beats hashing.
    const NONE: u32 = u32::MAX;
    let pool_len = team.pool().len();
    let mut x_node = vec![NONE; pool_len];
    let mut y_node = vec![NONE; pool_len];
    let mut node_value = Vec::new();
    let mut node_tag = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(team.len());
    let mut node_for = |table: &mut Vec<u32>, sym: Symbol, tag: Tag| -> u32 {
        let slot = &mut table[sym.index()];
        if *slot == NONE {
            *slot = node_value.len() as u32;
            node_value.push(sym);
            node_tag.push(tag);
        }
        *slot
    };
    for r in 0..team.len() {
        let a = node_for(&mut x_node, team.cell(r, cx), Tag::X);
        let b = node_for(&mut y_node, team.cell(r, cy), Tag::Y);
        pairs.push((a, b));
    }

    // Rows of a two-column team are already distinct pairs. Otherwise merge
    // rows that agree on (x, y); sorting keeps memory access sequential,
    // where a hash map over a million pairs would not.
    let (edges, row_edge) = if team.width() == 2 {
        let row_edge = (0..pairs.len() as u32).collect();
        (pairs, row_edge)
    } else {
        let mut order: Vec<u32> = (0..pairs.len() as u32).collect();
        order.sort_unstable_by_key(|&r| pairs[r as usize]);
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut row_edge = vec![0u32; pairs.len()];
        let mut remap = Vec::new();
        for &r in &order {
            let p = pairs[r as usize];
            if edges.last() != Some(&p) {
                edges.push(p);
                remap.push(u32::MAX);
            }
            row_edge[r as usize] = (edges.len() - 1) as u32;
        }
        // Number edges by first row, as the two-column case does.
        let mut sorted_edges = Vec::with_capacity(edges.len());
        for r in 0..row_edge.len() {
            let e = row_edge[r] as usize;
            if remap[e] == u32::MAX {
                remap[e] = sorted_edges.len() as u32;
                sorted_edges.push(edges[e]);
            }
            row_edge[r] = remap[e];
        }
        (sorted_edges, row_edge)
    };

    Ok(TeamGraph {
        x: x.to_string(),
        y: y.to_string(),
        node_value,
        node_tag,
        edges,
        row_edge,
        adjacency: OnceLock::new(),
    })
}

/// `Some(false)` when `|T↾{x,y}| > |rng x| + |rng y|`, which rules the mutual
/// formula out; `None` otherwise (no conclusion).
pub fn size_bound_reject(team: &Team, x: &str, y: &str) -> Result<Option<bool>> {
    let g = build_team_graph(team, x, y)?;
    Ok(size_bound_of(&g))
}

fn size_bound_of(g: &TeamGraph) -> Option<bool> {
    (g.num_edges() > g.num_nodes()).then_some(false)
}

/// Orients every edge so each node has at most one outgoing edge and returns
/// the induced split of the team rows the graph was built from.
pub fn orient_components(g: &TeamGraph) -> Result<SplitCertificate> {
    let (counts, _) = g.components();
    if let Some(c) = counts.iter().find(|c| c.edges > c.nodes) {
        return Err(Error::OrientationImpossible(format!(
            "a component has {} edges but only {} nodes",
            c.edges, c.nodes
        )));
    }
    split_from_orientation(g)
}

/// [`orient_components`] without the component check, for callers that have
/// already made it.
fn split_from_orientation(g: &TeamGraph) -> Result<SplitCertificate> {
    let x_to_y = orient(g)?;
    let sides: Vec<bool> = (0..g.num_rows()).map(|r| !x_to_y[g.row_edge(r)]).collect();
    Ok(SplitCertificate::from_sides(&sides))
}

/// Per edge: `true` if oriented from its x-node to its y-node.
///
/// Each node keeps its open-edge count and the XOR of its open edge ids, so
/// a leaf's last edge, or the way onward along a cycle, is read off directly
/// instead of scanning adjacency lists. At a million rows memory traffic is
/// what costs, and this touches about three cache lines per edge.
fn orient(g: &TeamGraph) -> Result<Vec<bool>> {
    const OPEN: u8 = 0;
    const X_TO_Y: u8 = 1;
    const Y_TO_X: u8 = 2;
    #[derive(Clone, Copy, Default)]
    struct Node {
        open: u32,
        xor: u32,
    }
    let n = g.num_nodes();
    let mut node = vec![Node::default(); n];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        for v in [a, b] {
            let v = &mut node[v as usize];
            v.open += 1;
            v.xor ^= e as u32;
        }
    }
    let mut state = vec![OPEN; g.num_edges()];
    let close = |from: usize, e: usize, node: &mut [Node], state: &mut [u8]| -> usize {
        let (a, b) = g.edges[e];
        // Edges run x-node → y-node, so `from` is the x end iff it is `a`.
        let (to, d) = if a as usize == from { (b, X_TO_Y) } else { (a, Y_TO_X) };
        state[e] = d;
        for v in [from, to as usize] {
            node[v].open -= 1;
            node[v].xor ^= e as u32;
        }
        to as usize
    };

    // Peel trees: a leaf points at its only neighbour. Any leaf order works;
    // a stack keeps the walk near recently touched nodes.
    let mut stack: Vec<usize> = (0..n).filter(|&v| node[v].open == 1).collect();
    while let Some(v) = stack.pop() {
        if node[v].open != 1 {
            continue;
        }
        let u = close(v, node[v].xor as usize, &mut node, &mut state);
        if node[u].open == 1 {
            stack.push(u);
        }
    }

    // What remains are disjoint simple cycles; walk each one way round,
    // starting from its first open edge.
    for e in 0..g.num_edges() {
        if state[e] != OPEN {
            continue;
        }
        let start = g.edges[e].0 as usize;
        if node[start].open != 2 {
            return Err(Error::OrientationImpossible(format!(
                "node {start} keeps {} open edges after peeling",
                node[start].open
            )));
        }
        let mut cur = close(start, e, &mut node, &mut state);
        while cur != start {
            if node[cur].open != 1 {
                return Err(Error::OrientationImpossible(format!(
                    "node {cur} lies on more than one cycle"
                )));
            }
            cur = close(cur, node[cur].xor as usize, &mut node, &mut state);
        }
    }
    Ok(state.into_iter().map(|s| s == X_TO_Y).collect())
}

pub fn check_mutual_unary(team: &Team, f: &DisjunctionFormula) -> Result<Verdict> {
    let (x, y) = f.as_mutual().ok_or_else(|| {
        Error::FormulaShape(format!("graph engine needs dep(x,y) | dep(y,x), got {f}"))
    })?;
    let g = build_team_graph(team, x, y)?;
    let mut stats = EngineStats {
        nodes: Some(g.num_nodes()),
        edges: Some(g.num_edges()),
        ..Default::default()
    };
    if size_bound_of(&g).is_some() {
        stats.size_bound_rejected = true;
        return Ok(Verdict::unsat(EngineKind::Graph, stats));
    }
    let (counts, _) = g.components();
    stats.components = Some(counts.len());
    if counts.iter().any(|c| c.edges > c.nodes) {
        return Ok(Verdict::unsat(EngineKind::Graph, stats));
    }
    let cert = split_from_orientation(&g)?;
    Ok(Verdict::sat(EngineKind::Graph, cert, stats))
}

/// Union-find with path halving and union by size.
pub(crate) struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] as usize != v {
            let p = self.parent[v] as usize;
            self.parent[v] = self.parent[p];
            v = p;
        }
        v
    }

    /// Returns `false` if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_split;
    use crate::formula::parse_formula;

    fn mutual() -> DisjunctionFormula {
        parse_formula("dep(x,y) | dep(y,x)").unwrap()
    }

    fn gt_team() -> Team {
        Team::from_labelled_rows(&["x", "y"], 1, &[["0", "0h"], ["0", "1h"], ["1", "0h"], ["1", "1h"]]).unwrap()
    }

    #[test]
    fn gt_graph_shape() {
        let g = build_team_graph(&gt_team(), "x", "y").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (4, 4));
        assert_eq!(g.components().0, vec![ComponentCounts { nodes: 4, edges: 4 }]);
    }

    #[test]
    fn gt_orientation_matches() {
        let t = gt_team();
        let v = check_mutual_unary(&t, &mutual()).unwrap();
        assert!(v.satisfied);
        let cert = v.certificate.unwrap();
        assert_eq!(cert.named(&t), (vec!["s1".into(), "s4".into()], vec!["s2".into(), "s3".into()]));
    }

    #[test]
    fn tagging_prevents_self_loop() {
        let t = Team::from_rows(&["x", "y"], &[["a", "a"]]).unwrap();
        let g = build_team_graph(&t, "x", "y").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (2, 1));
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn two_disjoint_squares() {
        let t = Team::from_rows(
            &["x", "y"],
            &[
                ["0", "0h"], ["0", "1h"], ["1", "0h"], ["1", "1h"],
                ["5", "5h"], ["5", "6h"], ["6", "5h"], ["6", "6h"],
            ],
        )
        .unwrap();
        let v = check_mutual_unary(&t, &mutual()).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.stats.components, Some(2));
        assert!(verify_split(&t, v.certificate.as_ref().unwrap(), &mutual()).unwrap());
    }

    #[test]
    fn path_and_single_edge_orient() {
        for rows in [vec![["a", "b"]], vec![["a", "b"], ["a", "c"]], vec![["a", "b"], ["c", "b"], ["c", "d"]]] {
            let t = Team::from_rows(&["x", "y"], &rows).unwrap();
            let g = build_team_graph(&t, "x", "y").unwrap();
            let cert = orient_components(&g).unwrap();
            assert!(verify_split(&t, &cert, &mutual()).unwrap());
        }
    }

    #[test]
    fn two_cycles_in_one_component_rejected() {
        // K_{2,3}: 5 nodes, 6 edges.
        let mut rows = Vec::new();
        for a in ["1", "2"] {
            for b in ["1", "2", "3"] {
                rows.push([a, b]);
            }
        }
        let t = Team::from_rows(&["x", "y"], &rows).unwrap();
        let g = build_team_graph(&t, "x", "y").unwrap();
        assert!(matches!(orient_components(&g), Err(Error::OrientationImpossible(_))));
        assert_eq!(size_bound_reject(&t, "x", "y").unwrap(), Some(false));
        assert!(!check_mutual_unary(&t, &mutual()).unwrap().satisfied);
    }

    #[test]
    fn size_bound_no_conclusion() {
        assert_eq!(size_bound_reject(&gt_team(), "x", "y").unwrap(), None);
        assert_eq!(size_bound_reject(&Team::empty(["x", "y"]).unwrap(), "x", "y").unwrap(), None);
    }

    #[test]
    fn wrong_shape_is_error() {
        let f = parse_formula("dep(x,y) | dep(x,z)").unwrap();
        let t = Team::empty(["x", "y", "z"]).unwrap();
        assert!(matches!(check_mutual_unary(&t, &f), Err(Error::FormulaShape(_))));
    }

    #[test]
    fn duplicate_restricted_rows_share_an_edge() {
        let t = Team::from_rows(&["x", "y", "z"], &[["1", "2", "a"], ["1", "2", "b"], ["1", "3", "a"]]).unwrap();
        let g = build_team_graph(&t, "x", "y").unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.row_edge(0), g.row_edge(1));
        let v = check_mutual_unary(&t, &mutual()).unwrap();
        assert!(verify_split(&t, v.certificate.as_ref().unwrap(), &mutual()).unwrap());
    }
}
