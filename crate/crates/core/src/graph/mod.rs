//! Weighted graph model shared by every solver in the crate.
//!
//! Nodes are dense integer ids with a side table of string labels. Each edge
//! carries a traversal weight and a removal cost. Undirected edges are stored
//! once with the lower node id first.

mod generators;
mod incidence;
mod io;
mod weights;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generators::{generate, KroneckerInitiator, Model};
pub use incidence::{incidence, IncidenceMatrix};
pub use io::{load_edge_list, save_edge_list, EdgeListFormat, LoadOptions};
pub use weights::{assign_weights, CostRule, WeightKind, WeightScheme};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Ordered set of edge ids, used for cuts and protected sets.
pub type EdgeSet = BTreeSet<EdgeId>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
    pub cost: f64,
}

impl Edge {
    /// The endpoint opposite `node`, if `node` is an endpoint.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if node == self.source {
            Some(self.target)
        } else if node == self.target {
            Some(self.source)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<(NodeId, EdgeId)>>,
    in_adj: Vec<Vec<(NodeId, EdgeId)>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed && self.labels == other.labels && self.edges == other.edges
    }
}

impl Graph {
    /// Builds a graph over nodes `0..node_count` labelled by their ids.
    pub fn from_edges<I>(directed: bool, node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64, f64)>,
    {
        let mut builder = GraphBuilder::with_nodes(directed, node_count);
        for (u, v, w, c) in edges {
            builder.add_edge(u, v, w, c)?;
        }
        Ok(builder.build())
    }

    /// Unit weights and unit costs.
    pub fn unweighted<I>(directed: bool, node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::from_edges(
            directed,
            node_count,
            edges.into_iter().map(|(u, v)| (u, v, 1.0, 1.0)),
        )
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn weight(&self, e: EdgeId) -> f64 {
        self.edges[e].weight
    }

    pub fn cost(&self, e: EdgeId) -> f64 {
        self.edges[e].cost
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.cost).collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.edges.iter().map(|e| e.cost).sum()
    }

    pub fn set_cost(&self, edges: impl IntoIterator<Item = EdgeId>) -> f64 {
        edges.into_iter().map(|e| self.edges[e].cost).sum()
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    /// Outgoing `(neighbor, edge)` pairs. For undirected graphs this lists every incident edge.
    pub fn out_edges(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        &self.out_adj[node]
    }

    /// Incoming `(neighbor, edge)` pairs. Same as [`Graph::out_edges`] for undirected graphs.
    pub fn in_edges(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        if self.directed {
            &self.in_adj[node]
        } else {
            &self.out_adj[node]
        }
    }

    /// Number of distinct incident edges (in + out for directed graphs).
    pub fn degree(&self, node: NodeId) -> usize {
        if self.directed {
            self.out_adj[node].len() + self.in_adj[node].len()
        } else {
            self.out_adj[node].len()
        }
    }

    /// Looks up the edge traversable from `u` to `v`.
    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&self.key(u, v)).copied()
    }

    /// The edge ids of the edges incident to `node`.
    pub fn incident_edges(&self, node: NodeId) -> impl Iterator<Item = EdgeId> + '_ {
        let ins: &[(NodeId, EdgeId)] = if self.directed {
            &self.in_adj[node]
        } else {
            &[]
        };
        self.out_adj[node].iter().chain(ins).map(|&(_, e)| e)
    }

    fn key(&self, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        if self.directed || u <= v {
            (u, v)
        } else {
            (v, u)
        }
    }

    /// Copy of the graph with new per-edge weights; costs are untouched.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Graph> {
        self.rebuild(|i, e| (weights[i], e.cost), weights.len())
    }

    /// Copy of the graph with new per-edge removal costs.
    pub fn with_costs(&self, costs: &[f64]) -> Result<Graph> {
        self.rebuild(|i, e| (e.weight, costs[i]), costs.len())
    }

    fn rebuild(&self, f: impl Fn(usize, &Edge) -> (f64, f64), len: usize) -> Result<Graph> {
        if len != self.edges.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {len}",
                self.edges.len()
            )));
        }
        let mut g = self.clone();
        for (i, edge) in g.edges.iter_mut().enumerate() {
            let (w, c) = f(i, &self.edges[i]);
            check_nonnegative(&self.labels, edge.source, edge.target, w, c)?;
            edge.weight = w;
            edge.cost = c;
        }
        Ok(g)
    }

    /// The same graph with the given edges deleted. Edge ids are renumbered densely;
    /// the returned vector maps new ids to old ids.
    pub fn without_edges(&self, removed: &EdgeSet) -> (Graph, Vec<EdgeId>) {
        let mut builder = GraphBuilder::with_labels(self.directed, self.labels.clone());
        let mut map = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if !removed.contains(&id) {
                builder
                    .add_edge(e.source, e.target, e.weight, e.cost)
                    .expect("edges of a valid graph stay valid");
                map.push(id);
            }
        }
        (builder.build(), map)
    }

    /// Subgraph induced by `nodes`; node ids are preserved, edges renumbered.
    /// The returned vector maps new edge ids to old ones.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, Vec<EdgeId>) {
        let mut keep = vec![false; self.node_count()];
        for &v in nodes {
            keep[v] = true;
        }
        let mut builder = GraphBuilder::with_labels(self.directed, self.labels.clone());
        let mut map = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if keep[e.source] && keep[e.target] {
                builder
                    .add_edge(e.source, e.target, e.weight, e.cost)
                    .expect("edges of a valid graph stay valid");
                map.push(id);
            }
        }
        (builder.build(), map)
    }
}

fn check_nonnegative(labels: &[String], u: NodeId, v: NodeId, w: f64, c: f64) -> Result<()> {
    for (what, value) in [("weight", w), ("cost", c)] {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeValue {
                what,
                value,
                u: labels[u].clone(),
                v: labels[v].clone(),
            });
        }
    }
    Ok(())
}

/// Incremental graph construction with validation.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    directed: bool,
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    edges: Vec<Edge>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            labels: Vec::new(),
            label_index: HashMap::new(),
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn with_nodes(directed: bool, node_count: usize) -> Self {
        Self::with_labels(directed, (0..node_count).map(|i| i.to_string()).collect())
    }

    pub fn with_labels(directed: bool, labels: Vec<String>) -> Self {
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        GraphBuilder {
            directed,
            labels,
            label_index,
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Returns the id for `label`, creating the node if needed.
    pub fn node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.label_index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.label_index.insert(label.to_string(), id);
        id
    }

    /// Adds an unlabelled node, named after its id.
    pub fn add_node(&mut self) -> NodeId {
        let mut label = self.labels.len().to_string();
        while self.label_index.contains_key(&label) {
            label.push('\'');
        }
        self.node(&label)
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        let key = if self.directed || u <= v { (u, v) } else { (v, u) };
        self.index.contains_key(&key)
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, weight: f64, cost: f64) -> Result<EdgeId> {
        let n = self.labels.len();
        if u >= n {
            return Err(Error::UnknownNode(u));
        }
        if v >= n {
            return Err(Error::UnknownNode(v));
        }
        if u == v {
            return Err(Error::SelfLoop(self.labels[u].clone()));
        }
        check_nonnegative(&self.labels, u, v, weight, cost)?;
        let key = if self.directed || u <= v { (u, v) } else { (v, u) };
        if self.index.contains_key(&key) {
            return Err(Error::DuplicateEdge(
                self.labels[u].clone(),
                self.labels[v].clone(),
            ));
        }
        let id = self.edges.len();
        self.index.insert(key, id);
        self.edges.push(Edge {
            source: key.0,
            target: key.1,
            weight,
            cost,
        });
        Ok(id)
    }

    pub fn add_labeled_edge(&mut self, u: &str, v: &str, weight: f64, cost: f64) -> Result<EdgeId> {
        let u = self.node(u);
        let v = self.node(v);
        self.add_edge(u, v, weight, cost)
    }

    pub fn build(self) -> Graph {
        let n = self.labels.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); if self.directed { n } else { 0 }];
        for (id, e) in self.edges.iter().enumerate() {
            out_adj[e.source].push((e.target, id));
            if self.directed {
                in_adj[e.target].push((e.source, id));
            } else {
                out_adj[e.target].push((e.source, id));
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        Graph {
            directed: self.directed,
            labels: self.labels,
            label_index: self.label_index,
            edges: self.edges,
            out_adj,
            in_adj,
            index: self.index,
        }
    }
}

/// Builds a graph from labelled `(u, v, weight, cost)` tuples. Node ids follow first appearance.
pub fn build_graph<'a, I>(directed: bool, edges: I) -> Result<Graph>
where
    I: IntoIterator<Item = (&'a str, &'a str, f64, f64)>,
{
    let mut builder = GraphBuilder::new(directed);
    for (u, v, w, c) in edges {
        builder.add_labeled_edge(u, v, w, c)?;
    }
    Ok(builder.build())
}
