//! Shortest-path primitives.
//!
//! Every search runs on a [`Restriction`] of the graph (blocked edges and nodes),
//! so callers never copy the graph to apply a cut.

pub(crate) mod waypoint;
pub(crate) mod yen;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, Graph, NodeId};

pub use waypoint::{shortest_path_via, shortest_path_via_edge, shortest_path_via_node};
pub use yen::{k_shortest_simple_paths, next_competing_path, SimplePaths};

/// Relative tolerance used when comparing path lengths.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

/// `a` is not longer than `b`, up to [`LENGTH_TOLERANCE`].
pub fn not_longer(a: f64, b: f64) -> bool {
    a <= b + LENGTH_TOLERANCE * b.abs().max(1.0)
}

/// `a` is strictly longer than `b`, up to [`LENGTH_TOLERANCE`].
pub fn strictly_longer(a: f64, b: f64) -> bool {
    !not_longer(a, b)
}

/// A simple path with its total weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub length: f64,
}

impl PartialEq for Path {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
    }
}

impl Eq for Path {}

impl Path {
    /// Builds a path from a node sequence, checking edges exist and no node repeats.
    pub fn from_nodes(g: &Graph, nodes: &[NodeId]) -> Result<Path> {
        if nodes.is_empty() {
            return Err(Error::InvalidPath("empty node sequence".into()));
        }
        let mut seen = vec![false; g.node_count()];
        for &v in nodes {
            if v >= g.node_count() {
                return Err(Error::UnknownNode(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPath(format!("node {} repeats", g.label(v))));
            }
        }
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        for pair in nodes.windows(2) {
            let e = g.find_edge(pair[0], pair[1]).ok_or_else(|| {
                Error::InvalidPath(format!(
                    "no edge from {} to {}",
                    g.label(pair[0]),
                    g.label(pair[1])
                ))
            })?;
            edges.push(e);
        }
        let length = edges.iter().map(|&e| g.weight(e)).sum();
        Ok(Path {
            nodes: nodes.to_vec(),
            edges,
            length,
        })
    }

    /// Builds a path from labelled nodes.
    pub fn from_labels(g: &Graph, labels: &[&str]) -> Result<Path> {
        let nodes = labels
            .iter()
            .map(|l| {
                g.node_by_label(l)
                    .ok_or_else(|| Error::InvalidPath(format!("unknown node `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_nodes(g, &nodes)
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().expect("paths are nonempty")
    }

    pub fn hops(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().copied().collect()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.nodes.contains(&v)
    }

    pub fn recomputed_length(&self, g: &Graph) -> f64 {
        self.edges.iter().map(|&e| g.weight(e)).sum()
    }

    /// Checks simplicity, edge/node consistency, and the stored length.
    pub fn is_consistent(&self, g: &Graph) -> bool {
        if self.nodes.is_empty() || self.edges.len() + 1 != self.nodes.len() {
            return false;
        }
        let mut seen = vec![false; g.node_count()];
        if self.nodes.iter().any(|&v| std::mem::replace(&mut seen[v], true)) {
            return false;
        }
        let joined = self
            .nodes
            .windows(2)
            .zip(&self.edges)
            .all(|(pair, &e)| g.find_edge(pair[0], pair[1]) == Some(e));
        let len = self.recomputed_length(g);
        joined && (len - self.length).abs() <= 1e-9 * len.abs().max(1.0)
    }

    /// Lexicographic order by (length, node sequence).
    pub fn order(&self, other: &Path) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then_with(|| self.nodes.cmp(&other.nodes))
    }

    pub fn describe(&self, g: &Graph) -> String {
        self.nodes
            .iter()
            .map(|&v| g.label(v))
            .collect::<Vec<_>>()
            .join("-")
    }

    fn concat(g: &Graph, parts: &[&[NodeId]]) -> Path {
        let mut nodes: Vec<NodeId> = Vec::new();
        for part in parts {
            for &v in *part {
                if nodes.last() != Some(&v) {
                    nodes.push(v);
                }
            }
        }
        let edges: Vec<EdgeId> = nodes
            .windows(2)
            .map(|p| g.find_edge(p[0], p[1]).expect("concatenated parts are joined"))
            .collect();
        let length = edges.iter().map(|&e| g.weight(e)).sum();
        Path {
            nodes,
            edges,
            length,
        }
    }
}

/// Edges and nodes excluded from a search.
#[derive(Debug, Clone)]
pub struct Restriction {
    edge_blocked: Vec<bool>,
    node_blocked: Vec<bool>,
}

impl Restriction {
    pub fn none(g: &Graph) -> Self {
        Restriction {
            edge_blocked: vec![false; g.edge_count()],
            node_blocked: vec![false; g.node_count()],
        }
    }

    pub fn without_edges<'a>(g: &Graph, removed: impl IntoIterator<Item = &'a EdgeId>) -> Self {
        let mut r = Self::none(g);
        for &e in removed {
            r.edge_blocked[e] = true;
        }
        r
    }

    pub fn block_edge(&mut self, e: EdgeId) -> &mut Self {
        self.edge_blocked[e] = true;
        self
    }

    pub fn block_node(&mut self, v: NodeId) -> &mut Self {
        self.node_blocked[v] = true;
        self
    }

    pub fn unblock_node(&mut self, v: NodeId) -> &mut Self {
        self.node_blocked[v] = false;
        self
    }

    pub fn edge_allowed(&self, e: EdgeId) -> bool {
        !self.edge_blocked[e]
    }

    pub fn node_allowed(&self, v: NodeId) -> bool {
        !self.node_blocked[v]
    }

    /// Keeps only nodes within `hops` unweighted hops of `source` (through allowed edges).
    pub fn limit_to_hop_neighborhood(&mut self, g: &Graph, source: NodeId, hops: usize) -> &mut Self {
        let depth = bfs_depths(g, source, self);
        for (v, d) in depth.iter().enumerate() {
            if d.is_none_or(|d| d > hops) {
                self.node_blocked[v] = true;
            }
        }
        self
    }
}

/// Unweighted BFS depths from `source` on allowed edges/nodes (directed graphs follow edge direction).
pub fn bfs_depths(g: &Graph, source: NodeId, r: &Restriction) -> Vec<Option<usize>> {
    let mut depth = vec![None; g.node_count()];
    if !r.node_allowed(source) {
        return depth;
    }
    depth[source] = Some(0);
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let d = depth[u].unwrap();
        for &(v, e) in g.out_edges(u) {
            if depth[v].is_none() && r.edge_allowed(e) && r.node_allowed(v) {
                depth[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    depth
}

pub fn reachable(g: &Graph, s: NodeId, t: NodeId, r: &Restriction) -> bool {
    bfs_depths(g, s, r)[t].is_some()
}

#[derive(Copy, Clone, PartialEq)]
struct Entry(f64, NodeId);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances from every node to `target` on the restricted graph.
pub(crate) fn distances_to(g: &Graph, target: NodeId, r: &Restriction) -> Vec<f64> {
    dijkstra(g, target, r, false)
}

/// Distances from `source` to every node on the restricted graph.
pub(crate) fn distances_from(g: &Graph, source: NodeId, r: &Restriction) -> Vec<f64> {
    dijkstra(g, source, r, true)
}

fn dijkstra(g: &Graph, root: NodeId, r: &Restriction, forward: bool) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.node_count()];
    if !r.node_allowed(root) {
        return dist;
    }
    dist[root] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, root)]);
    while let Some(Entry(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        let adj = if forward { g.out_edges(v) } else { g.in_edges(v) };
        for &(u, e) in adj {
            if !r.edge_allowed(e) || !r.node_allowed(u) {
                continue;
            }
            let cand = g.weight(e) + d;
            if cand < dist[u] {
                dist[u] = cand;
                heap.push(Entry(cand, u));
            }
        }
    }
    dist
}

/// Shortest `s`–`t` path on the restricted graph. Among equal-length paths the
/// lexicographically smallest node sequence wins.
pub fn shortest_path_restricted(g: &Graph, s: NodeId, t: NodeId, r: &Restriction) -> Option<Path> {
    if !r.node_allowed(s) || !r.node_allowed(t) {
        return None;
    }
    let dist = distances_to(g, t, r);
    if !dist[s].is_finite() {
        return None;
    }
    if s == t {
        return Some(Path {
            nodes: vec![s],
            edges: vec![],
            length: 0.0,
        });
    }
    // Walk tight edges in neighbor order; backtracking only happens on zero-weight cycles.
    let mut on_path = vec![false; g.node_count()];
    let mut nodes = vec![s];
    let mut edges = Vec::new();
    let mut cursor = vec![0usize];
    on_path[s] = true;
    while let Some(&u) = nodes.last() {
        if u == t {
            let length = edges.iter().map(|&e| g.weight(e)).sum();
            return Some(Path {
                nodes,
                edges,
                length,
            });
        }
        let adj = g.out_edges(u);
        let pos = cursor.last_mut().unwrap();
        let mut advanced = false;
        while *pos < adj.len() {
            let (v, e) = adj[*pos];
            *pos += 1;
            if on_path[v] || !r.edge_allowed(e) || !r.node_allowed(v) {
                continue;
            }
            if dist[u] == g.weight(e) + dist[v] {
                on_path[v] = true;
                nodes.push(v);
                edges.push(e);
                cursor.push(0);
                advanced = true;
                break;
            }
        }
        if !advanced {
            on_path[u] = false;
            nodes.pop();
            edges.pop();
            cursor.pop();
        }
    }
    None
}

/// Shortest `s`–`t` path after deleting `removed`. `None` means `t` is unreachable.
pub fn shortest_path(g: &Graph, s: NodeId, t: NodeId, removed: &EdgeSet) -> Option<Path> {
    shortest_path_restricted(g, s, t, &Restriction::without_edges(g, removed))
}
