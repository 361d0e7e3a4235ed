//! Exact reference solvers by exhaustive enumeration, for checking the approximate
//! solvers on small instances.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::attack::{is_strictly_shortest, is_strictly_shortest_without_nodes, NodeAttackInstance};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, Graph, NodeId};
use crate::paths::{distances_from, distances_to, not_longer, Path, Restriction};
use crate::target::{is_valid_target_cut, Target};

pub const DEFAULT_MAX_EDGES: usize = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactCut {
    /// Removed edges, or removed nodes for node removal.
    pub removed: BTreeSet<usize>,
    pub cost: f64,
    /// Subsets checked before the optimum was found.
    pub evaluated: usize,
}

#[derive(Clone, Copy, PartialEq)]
struct Partial {
    sum: f64,
    /// Position of the last chosen element in cost order.
    last: usize,
    mask: u64,
}

impl Eq for Partial {}

impl Ord for Partial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.sum.total_cmp(&self.sum).then_with(|| other.mask.cmp(&self.mask))
    }
}

impl PartialOrd for Partial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Nonempty subsets of `0..costs.len()` in nondecreasing total cost, generated lazily.
///
/// Elements are sorted by cost; each subset spawns two successors, one extending it
/// with the next element and one swapping its last element for the next.
pub struct SubsetsByCost {
    order: Vec<usize>,
    costs: Vec<f64>,
    heap: BinaryHeap<Partial>,
}

impl SubsetsByCost {
    pub fn new(costs: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..costs.len()).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| costs[i]).collect();
        let mut heap = BinaryHeap::new();
        if !sorted.is_empty() {
            heap.push(Partial {
                sum: sorted[0],
                last: 0,
                mask: 1,
            });
        }
        SubsetsByCost {
            order,
            costs: sorted,
            heap,
        }
    }
}

impl Iterator for SubsetsByCost {
    /// Chosen element indices and their total cost.
    type Item = (Vec<usize>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.heap.pop()?;
        let next = cur.last + 1;
        if next < self.costs.len() {
            self.heap.push(Partial {
                sum: cur.sum + self.costs[next],
                last: next,
                mask: cur.mask | 1 << next,
            });
            self.heap.push(Partial {
                sum: cur.sum - self.costs[cur.last] + self.costs[next],
                last: next,
                mask: (cur.mask & !(1 << cur.last)) | 1 << next,
            });
        }
        let chosen = (0..self.costs.len()).filter(|&i| cur.mask >> i & 1 == 1).map(|i| self.order[i]).collect();
        Some((chosen, cur.sum))
    }
}

/// Cheapest subset of `candidates` accepted by `valid`, trying subsets by cost.
fn cheapest_subset(candidates: &[usize], costs: &[f64], max: usize, mut valid: impl FnMut(&BTreeSet<usize>) -> bool) -> Result<ExactCut> {
    if candidates.len() > max.min(63) {
        return Err(Error::TooLarge {
            candidates: candidates.len(),
            limit: max.min(63),
        });
    }
    let mut evaluated = 1;
    if valid(&BTreeSet::new()) {
        return Ok(ExactCut {
            removed: BTreeSet::new(),
            cost: 0.0,
            evaluated,
        });
    }
    let local: Vec<f64> = candidates.iter().map(|&c| costs[c]).collect();
    for (chosen, cost) in SubsetsByCost::new(&local) {
        evaluated += 1;
        let removed: BTreeSet<usize> = chosen.into_iter().map(|i| candidates[i]).collect();
        if valid(&removed) {
            return Ok(ExactCut { removed, cost, evaluated });
        }
    }
    Err(Error::InfeasibleInstance("no subset of the candidates is a valid cut".into()))
}

/// Edges that lie on some `s`–`t` walk no longer than `bound`.
fn edges_within(g: &Graph, s: NodeId, t: NodeId, bound: f64) -> Vec<EdgeId> {
    let r = Restriction::none(g);
    let from_s = distances_from(g, s, &r);
    let to_t = distances_to(g, t, &r);
    (0..g.edge_count())
        .filter(|&e| {
            let edge = g.edge(e);
            let w = g.weight(e);
            let forward = not_longer(from_s[edge.source] + w + to_t[edge.target], bound);
            forward || (!g.is_directed() && not_longer(from_s[edge.target] + w + to_t[edge.source], bound))
        })
        .collect()
}

/// Minimum-cost edge set whose removal leaves `p_star` the unique shortest path.
/// Only edges on some route no longer than `p_star` are candidates.
pub fn brute_force_path_cut(g: &Graph, p_star: &Path, keep: &EdgeSet, max_edges: usize) -> Result<ExactCut> {
    if !p_star.is_consistent(g) {
        return Err(Error::InvalidPath("target path does not match the graph".into()));
    }
    let candidates: Vec<EdgeId> = edges_within(g, p_star.source(), p_star.target(), p_star.length)
        .into_iter()
        .filter(|e| !keep.contains(e) && !p_star.contains_edge(*e))
        .collect();
    cheapest_subset(&candidates, &g.costs(), max_edges, |cut| is_strictly_shortest(g, p_star, cut))
}

/// Minimum-cost edge set after whose removal every shortest `s`–`t` path uses the target.
pub fn brute_force_target_cut(g: &Graph, s: NodeId, t: NodeId, target: Target, max_edges: usize) -> Result<ExactCut> {
    let protected = target.protected_edges();
    let candidates: Vec<EdgeId> = (0..g.edge_count()).filter(|e| !protected.contains(e)).collect();
    cheapest_subset(&candidates, &g.costs(), max_edges, |cut| is_valid_target_cut(g, s, t, target, cut))
}

/// Minimum-cost node set whose removal leaves the target path uniquely shortest.
pub fn brute_force_node_removal(inst: &NodeAttackInstance, max_nodes: usize) -> Result<ExactCut> {
    let candidates: Vec<NodeId> = (0..inst.graph.node_count())
        .filter(|v| !inst.protected_nodes.contains(v) && !inst.p_star.contains_node(*v))
        .collect();
    cheapest_subset(&candidates, &inst.node_cost, max_nodes, |cut| {
        is_strictly_shortest_without_nodes(&inst.graph, &inst.p_star, cut)
    })
}

/// Minimum `s`–`t` edge cut with removal costs as capacities, skipping `excluded`
/// edges. Undirected edges carry flow both ways.
pub fn min_cut_value(g: &Graph, s: NodeId, t: NodeId, excluded: &EdgeSet) -> f64 {
    let n = g.node_count();
    // residual arcs stored in pairs: arc i and its reverse i ^ 1
    let mut head = Vec::new();
    let mut cap = Vec::new();
    let mut adj = vec![Vec::new(); n];
    let mut add = |u: NodeId, v: NodeId, c_uv: f64, c_vu: f64| {
        adj[u].push(head.len());
        head.push(v);
        cap.push(c_uv);
        adj[v].push(head.len());
        head.push(u);
        cap.push(c_vu);
    };
    for (e, edge) in g.edges().iter().enumerate() {
        if excluded.contains(&e) {
            continue;
        }
        let back = if g.is_directed() { 0.0 } else { edge.cost };
        add(edge.source, edge.target, edge.cost, back);
    }
    let mut total = 0.0;
    loop {
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &adj[u] {
                let v = head[a];
                if !seen[v] && cap[a] > 1e-12 {
                    seen[v] = true;
                    via[v] = Some(a);
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return total;
        }
        let mut push = f64::INFINITY;
        let mut v = t;
        while let Some(a) = via[v] {
            push = push.min(cap[a]);
            v = head[a ^ 1];
        }
        if !push.is_finite() {
            return f64::INFINITY;
        }
        let mut v = t;
        while let Some(a) = via[v] {
            cap[a] -= push;
            cap[a ^ 1] += push;
            v = head[a ^ 1];
        }
        total += push;
    }
}
