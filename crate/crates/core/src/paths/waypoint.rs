//! Shortest simple paths forced through a given edge or node.
//!
//! Concatenating the two unconstrained shortest halves can revisit a node, so the
//! search enumerates first halves in nondecreasing length and pairs each with the
//! shortest second half that avoids it. Enumeration stops once no remaining first
//! half can beat the incumbent, which makes the result exact.

use crate::graph::{EdgeId, EdgeSet, Graph, NodeId};
use crate::target::Target;

use super::{distances_to, shortest_path_restricted, Path, Restriction, SimplePaths};

/// Shortest simple `s`–`t` path that traverses `e_star`. Undirected edges are tried
/// in both orientations and the shorter result kept. `None` if no such path exists.
pub fn shortest_path_via_edge(g: &Graph, s: NodeId, t: NodeId, e_star: EdgeId, removed: &EdgeSet) -> Option<Path> {
    let r = Restriction::without_edges(g, removed);
    via_edge_restricted(g, s, t, e_star, &r)
}

/// Shortest simple `s`–`t` path through `v_star`. `None` if no such path exists.
pub fn shortest_path_via_node(g: &Graph, s: NodeId, t: NodeId, v_star: NodeId, removed: &EdgeSet) -> Option<Path> {
    let r = Restriction::without_edges(g, removed);
    via_node_restricted(g, s, t, v_star, &r)
}

/// Dispatches on the target kind.
pub fn shortest_path_via(g: &Graph, s: NodeId, t: NodeId, target: Target, removed: &EdgeSet) -> Option<Path> {
    let r = Restriction::without_edges(g, removed);
    via_restricted(g, s, t, target, &r)
}

pub(crate) fn via_restricted(g: &Graph, s: NodeId, t: NodeId, target: Target, r: &Restriction) -> Option<Path> {
    match target {
        Target::Edge(e) => via_edge_restricted(g, s, t, e, r),
        Target::Node(v) => via_node_restricted(g, s, t, v, r),
    }
}

pub(crate) fn via_edge_restricted(g: &Graph, s: NodeId, t: NodeId, e_star: EdgeId, r: &Restriction) -> Option<Path> {
    if !r.edge_allowed(e_star) {
        return None;
    }
    let edge = g.edge(e_star);
    let mut orientations = vec![(edge.source, edge.target)];
    if !g.is_directed() {
        orientations.push((edge.target, edge.source));
    }
    orientations
        .into_iter()
        .filter_map(|(u, v)| via_oriented_edge(g, s, t, u, v, r))
        .min_by(|a, b| a.order(b))
}

fn via_oriented_edge(g: &Graph, s: NodeId, t: NodeId, u: NodeId, v: NodeId, r: &Restriction) -> Option<Path> {
    if u == t || v == s || s == t {
        return None;
    }
    for node in [s, t, u, v] {
        if !r.node_allowed(node) {
            return None;
        }
    }
    let e_star = g.find_edge(u, v).expect("oriented target edge exists");
    let w_star = g.weight(e_star);

    // Lower bound on any second half: it can never touch s or u.
    let mut second_base = r.clone();
    second_base.block_node(s).block_node(u);
    let tail_bound = distances_to(g, t, &second_base)[v];
    if !tail_bound.is_finite() {
        return None;
    }

    let mut first_base = r.clone();
    first_base.block_node(v).block_node(t);
    let mut best: Option<Path> = None;
    for head in SimplePaths::new(g, s, u, first_base) {
        if let Some(b) = &best {
            if head.length + w_star + tail_bound >= b.length {
                break;
            }
        }
        let mut second = r.clone();
        for &x in &head.nodes {
            second.block_node(x);
        }
        if let Some(tail) = shortest_path_restricted(g, v, t, &second) {
            let candidate = Path::concat(g, &[&head.nodes, &tail.nodes]);
            if best.as_ref().is_none_or(|b| candidate.order(b).is_lt()) {
                best = Some(candidate);
            }
        }
    }
    best
}

pub(crate) fn via_node_restricted(g: &Graph, s: NodeId, t: NodeId, v_star: NodeId, r: &Restriction) -> Option<Path> {
    if v_star == s || v_star == t {
        return shortest_path_restricted(g, s, t, r);
    }
    for node in [s, t, v_star] {
        if !r.node_allowed(node) {
            return None;
        }
    }
    let mut second_base = r.clone();
    second_base.block_node(s);
    let tail_bound = distances_to(g, t, &second_base)[v_star];
    if !tail_bound.is_finite() {
        return None;
    }
    let mut first_base = r.clone();
    first_base.block_node(t);
    let mut best: Option<Path> = None;
    for head in SimplePaths::new(g, s, v_star, first_base) {
        if let Some(b) = &best {
            if head.length + tail_bound >= b.length {
                break;
            }
        }
        let mut second = r.clone();
        for &x in &head.nodes[..head.nodes.len() - 1] {
            second.block_node(x);
        }
        if let Some(tail) = shortest_path_restricted(g, v_star, t, &second) {
            let candidate = Path::concat(g, &[&head.nodes, &tail.nodes]);
            if best.as_ref().is_none_or(|b| candidate.order(b).is_lt()) {
                best = Some(candidate);
            }
        }
    }
    best
}
