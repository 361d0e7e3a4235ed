//! Structured instances with known answers: hardness-reduction constructions, the
//! bottleneck instance that separates path-targeted and target-cut costs, and cliques.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, Graph, GraphBuilder, NodeId};
use crate::paths::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    ThreeTerminal,
    DirectedDoubling,
    LineGraph,
}

/// An original graph together with the instance built from it.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub kind: FixtureKind,
    pub original: Graph,
    pub terminals: Vec<NodeId>,
    pub reduced: Graph,
    pub s: NodeId,
    pub t: NodeId,
    /// Target path in the reduced graph; absent for the doubling, which has none.
    pub p_star: Option<Path>,
    /// For each reduced edge (or, for the line graph, each reduced node) the original edge it stands for.
    pub origin: Vec<Option<EdgeId>>,
}

impl ReductionInstance {
    /// Maps a cut of the reduced graph back to original edges. For the three-terminal
    /// construction a cut with at least `M` edges maps to the whole original edge set.
    pub fn map_back(&self, cut: &BTreeSet<usize>) -> EdgeSet {
        if self.kind == FixtureKind::ThreeTerminal && cut.len() >= self.original.edge_count() {
            return (0..self.original.edge_count()).collect();
        }
        cut.iter().filter_map(|&i| self.origin.get(i).copied().flatten()).collect()
    }
}

fn unit_path(b: &mut GraphBuilder, from: NodeId, to: NodeId, hops: usize) -> Result<Vec<NodeId>> {
    let mut nodes = vec![from];
    for _ in 1..hops {
        let v = b.add_node();
        b.add_edge(*nodes.last().unwrap(), v, 1.0, 1.0)?;
        nodes.push(v);
    }
    b.add_edge(*nodes.last().unwrap(), to, 1.0, 1.0)?;
    nodes.push(to);
    Ok(nodes)
}

/// Appends `M+1` disjoint `N`-hop paths between `s1`–`s2` and `s2`–`s3`, and a
/// `(2N-1)`-hop target path from `s1` to `s3`. All new weights and costs are 1.
pub fn build_three_terminal_fixture(g: &Graph, s1: NodeId, s2: NodeId, s3: NodeId) -> Result<ReductionInstance> {
    if g.is_directed() {
        return Err(Error::InvalidParameter("three-terminal construction needs an undirected graph".into()));
    }
    let terminals = vec![s1, s2, s3];
    for &v in &terminals {
        if v >= g.node_count() {
            return Err(Error::UnknownNode(v));
        }
    }
    if s1 == s2 || s2 == s3 || s1 == s3 {
        return Err(Error::InvalidParameter("terminals must be distinct".into()));
    }
    let (n, m) = (g.node_count(), g.edge_count());
    let mut b = GraphBuilder::with_labels(false, g.labels().to_vec());
    let mut origin = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        b.add_edge(e.source, e.target, 1.0, 1.0)?;
        origin.push(Some(id));
    }
    for (from, to) in [(s1, s2), (s2, s3)] {
        for _ in 0..=m {
            unit_path(&mut b, from, to, n)?;
        }
    }
    let p_nodes = unit_path(&mut b, s1, s3, 2 * n - 1)?;
    let reduced = b.build();
    origin.resize(reduced.edge_count(), None);
    let p_star = Path::from_nodes(&reduced, &p_nodes)?;
    Ok(ReductionInstance {
        kind: FixtureKind::ThreeTerminal,
        original: g.clone(),
        terminals,
        reduced,
        s: s1,
        t: s3,
        p_star: Some(p_star),
        origin,
    })
}

/// Replaces each undirected edge by two opposite arcs with the same weight and cost.
pub fn build_directed_doubling(g: &Graph) -> Result<ReductionInstance> {
    if g.is_directed() {
        return Err(Error::InvalidParameter("doubling needs an undirected graph".into()));
    }
    let mut b = GraphBuilder::with_labels(true, g.labels().to_vec());
    let mut origin = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        b.add_edge(e.source, e.target, e.weight, e.cost)?;
        b.add_edge(e.target, e.source, e.weight, e.cost)?;
        origin.extend([Some(id), Some(id)]);
    }
    Ok(ReductionInstance {
        kind: FixtureKind::DirectedDoubling,
        original: g.clone(),
        terminals: Vec::new(),
        reduced: b.build(),
        s: 0,
        t: 0,
        p_star: None,
        origin,
    })
}

/// Line graph of `g` plus a new source joined to every edge at `s` and a new sink
/// joined to every edge at `t`. Node `i < M` of the result stands for original edge `i`.
pub fn build_line_graph_fixture(g: &Graph, p_star: &Path) -> Result<ReductionInstance> {
    if g.is_directed() {
        return Err(Error::InvalidParameter("line-graph construction needs an undirected graph".into()));
    }
    if !p_star.is_consistent(g) {
        return Err(Error::InvalidPath("target path does not match the graph".into()));
    }
    let (s, t) = (p_star.source(), p_star.target());
    let m = g.edge_count();
    let mut labels: Vec<String> = g
        .edges()
        .iter()
        .map(|e| format!("{}{}", g.label(e.source), g.label(e.target)))
        .collect();
    // keep labels unique even when concatenations collide
    let mut seen = std::collections::HashSet::new();
    for (i, l) in labels.iter_mut().enumerate() {
        if !seen.insert(l.clone()) {
            *l = format!("{l}#{i}");
            seen.insert(l.clone());
        }
    }
    labels.push("s_hat".into());
    labels.push("t_hat".into());
    let (s_hat, t_hat) = (m, m + 1);
    let mut b = GraphBuilder::with_labels(false, labels);
    for v in 0..g.node_count() {
        let incident: Vec<EdgeId> = g.incident_edges(v).collect();
        for (i, &a) in incident.iter().enumerate() {
            for &c in &incident[i + 1..] {
                if !b.contains_edge(a, c) {
                    b.add_edge(a, c, 1.0, 1.0)?;
                }
            }
        }
        if v == s || v == t {
            let hub = if v == s { s_hat } else { t_hat };
            for &e in &incident {
                b.add_edge(hub, e, 1.0, 1.0)?;
            }
        }
    }
    let reduced = b.build();
    let mut nodes = vec![s_hat];
    nodes.extend(p_star.edges.iter().copied());
    nodes.push(t_hat);
    let p_hat = Path::from_nodes(&reduced, &nodes)?;
    let mut origin: Vec<Option<EdgeId>> = (0..m).map(Some).collect();
    origin.extend([None, None]);
    Ok(ReductionInstance {
        kind: FixtureKind::LineGraph,
        original: g.clone(),
        terminals: vec![s, t],
        reduced,
        s: s_hat,
        t: t_hat,
        p_star: Some(p_hat),
        origin,
    })
}

/// Bottleneck instance: the shortest route through the target costs `k·c_max` to force
/// along its own path, while cutting a single `c_min` edge reroutes everything through it.
#[derive(Debug, Clone)]
pub struct Bottleneck {
    pub graph: Graph,
    pub s: NodeId,
    pub t: NodeId,
    pub target: EdgeId,
    pub cheap_edge: EdgeId,
    /// Shortest path through the target in the intact graph.
    pub p_star: Path,
}

pub fn bottleneck(k: usize, c_min: f64, c_max: f64) -> Bottleneck {
    let mut b = GraphBuilder::new(false);
    let add = |b: &mut GraphBuilder, u: &str, v: &str, c: f64| b.add_labeled_edge(u, v, 1.0, c).expect("fixture edges are valid");
    let cheap_edge = add(&mut b, "s", "m", c_min);
    for i in 1..=k {
        let a = format!("a{i}");
        add(&mut b, "m", &a, c_max);
        add(&mut b, &a, "t", c_max);
    }
    add(&mut b, "m", "u", c_max);
    let target = add(&mut b, "u", "v", c_max);
    add(&mut b, "v", "t", c_max);
    add(&mut b, "s", "w1", c_max);
    add(&mut b, "w1", "w2", c_max);
    add(&mut b, "w2", "u", c_max);
    let graph = b.build();
    let p_star = Path::from_labels(&graph, &["s", "m", "u", "v", "t"]).expect("fixture path exists");
    Bottleneck {
        s: graph.node_by_label("s").unwrap(),
        t: graph.node_by_label("t").unwrap(),
        graph,
        target,
        cheap_edge,
        p_star,
    }
}

/// Complete graph on `n` nodes with unit weights and costs, except the direct edge
/// from node 0 to node `n-1`, whose weight is `n`. That edge is the target path, so
/// every other route must be cut: the optimum is `n-2`.
#[derive(Debug, Clone)]
pub struct Clique {
    pub graph: Graph,
    pub p_star: Path,
}

pub fn clique(n: usize) -> Result<Clique> {
    if n < 3 {
        return Err(Error::InvalidParameter("clique fixture needs n >= 3".into()));
    }
    let mut b = GraphBuilder::with_nodes(false, n);
    for u in 0..n {
        for v in u + 1..n {
            let w = if (u, v) == (0, n - 1) { n as f64 } else { 1.0 };
            b.add_edge(u, v, w, 1.0)?;
        }
    }
    let graph = b.build();
    let p_star = Path::from_nodes(&graph, &[0, n - 1])?;
    Ok(Clique { graph, p_star })
}
