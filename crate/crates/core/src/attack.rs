//! Constraint generation for making a given path the unique shortest path.
//!
//! A shortest-path oracle proposes the competing path that currently beats or ties
//! the target path; it becomes a cover row and the cover is re-solved from scratch
//! on the whole accumulated row set.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cover::{solve_cover, CoverEngine, CoverResult, PathConstraintSet};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, Graph, NodeId};
use crate::paths::yen::next_competing_path_restricted;
use crate::paths::{not_longer, strictly_longer, Path, Restriction};

#[derive(Debug, Clone, Default)]
pub struct AttackOptions {
    pub engine: CoverEngine,
    pub seed: u64,
    /// Defaults to ten times the number of removable elements.
    pub max_iterations: Option<usize>,
    /// Confine every search to nodes within this many hops of the source.
    pub neighborhood: Option<usize>,
    /// Only consulted by the exact engine.
    pub deadline: Option<Instant>,
}

impl AttackOptions {
    pub fn new(engine: CoverEngine, seed: u64) -> Self {
        AttackOptions {
            engine,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathAttackReport {
    /// Removed elements: edge ids for edge removal, node ids for node removal.
    pub cut: CoverResult,
    pub iterations: usize,
    pub generated_paths: Vec<Path>,
    /// The target path is strictly shorter than every other surviving path.
    pub final_check: bool,
    #[serde(with = "seconds")]
    pub wall_time: Duration,
}

pub(crate) mod seconds {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?))
    }
}

/// Proposes the next row for the current cut, or `None` when the cut suffices.
pub(crate) type Oracle<'a> = dyn FnMut(&BTreeSet<usize>) -> Result<Option<(Path, Vec<usize>)>> + 'a;

pub(crate) struct Generated {
    pub cut: CoverResult,
    pub iterations: usize,
    pub pcs: PathConstraintSet,
}

/// Shared loop: solve the cover, ask the oracle, add its row, repeat.
pub(crate) fn constraint_generation(
    mut pcs: PathConstraintSet,
    oracle: &mut Oracle<'_>,
    opts: &AttackOptions,
) -> Result<Generated> {
    let cap = opts.max_iterations.unwrap_or(10 * pcs.element_count().max(1));
    let mut iterations = 0;
    loop {
        let seed = opts.seed.wrapping_add(iterations as u64);
        let cut = solve_cover(&pcs, opts.engine, seed, opts.deadline)?;
        match oracle(&cut.cut)? {
            None => {
                return Ok(Generated { cut, iterations, pcs });
            }
            Some((path, elements)) => {
                if iterations >= cap {
                    return Err(Error::IterationCap(cap));
                }
                iterations += 1;
                if !pcs.add_row(elements, path)? {
                    return Err(Error::NumericalInstability(
                        "oracle returned a path the cover already cuts".into(),
                    ));
                }
            }
        }
    }
}

fn base_restriction(g: &Graph, source: NodeId, neighborhood: Option<usize>) -> Restriction {
    let mut r = Restriction::none(g);
    if let Some(h) = neighborhood {
        r.limit_to_hop_neighborhood(g, source, h);
    }
    r
}

/// Whether `p_star` is strictly shorter than every other path under `r`.
fn strictly_shortest_under(g: &Graph, p_star: &Path, r: Restriction) -> bool {
    match next_competing_path_restricted(g, p_star, r) {
        None => true,
        Some(p) => strictly_longer(p.length, p_star.length),
    }
}

/// Whether `p_star` is the unique shortest path once `removed` is deleted.
pub fn is_strictly_shortest(g: &Graph, p_star: &Path, removed: &EdgeSet) -> bool {
    strictly_shortest_under(g, p_star, Restriction::without_edges(g, removed))
}

/// Whether `p_star` is the unique shortest path once the nodes in `removed` are deleted.
pub fn is_strictly_shortest_without_nodes(g: &Graph, p_star: &Path, removed: &BTreeSet<NodeId>) -> bool {
    let mut r = Restriction::none(g);
    for &v in removed {
        r.block_node(v);
    }
    strictly_shortest_under(g, p_star, r)
}

/// Finds edges whose removal leaves `p_star` the unique shortest `s`–`t` path.
///
/// The edges of `p_star` are always protected in addition to `keep`.
pub fn pathattack(g: &Graph, p_star: &Path, keep: &EdgeSet, opts: &AttackOptions) -> Result<PathAttackReport> {
    pathattack_without(g, p_star, keep, &EdgeSet::new(), true, opts)
}

/// [`pathattack`] on `g` with the edges in `absent` already deleted. With
/// `protect_path` off, edges of `p_star` may be cut too, so the result cuts every
/// other path no longer than `p_star`.
pub(crate) fn pathattack_without(
    g: &Graph,
    p_star: &Path,
    keep: &EdgeSet,
    absent: &EdgeSet,
    protect_path: bool,
    opts: &AttackOptions,
) -> Result<PathAttackReport> {
    let start = Instant::now();
    if !p_star.is_consistent(g) || p_star.edges.iter().any(|e| absent.contains(e)) {
        return Err(Error::InvalidPath("target path does not match the graph".into()));
    }
    let mut protected = keep.clone();
    if protect_path {
        protected.extend(p_star.edges.iter().copied());
    }
    let mut base = base_restriction(g, p_star.source(), opts.neighborhood);
    for &e in absent {
        base.block_edge(e);
    }
    let pcs = PathConstraintSet::new(g.costs(), protected);
    let mut oracle = |cut: &BTreeSet<usize>| -> Result<Option<(Path, Vec<usize>)>> {
        let mut r = base.clone();
        for &e in cut {
            r.block_edge(e);
        }
        Ok(next_competing_path_restricted(g, p_star, r)
            .filter(|p| not_longer(p.length, p_star.length))
            .map(|p| {
                let edges = p.edges.clone();
                (p, edges)
            }))
    };
    let run = constraint_generation(pcs, &mut oracle, opts)?;
    let mut check = base.clone();
    for &e in &run.cut.cut {
        check.block_edge(e);
    }
    let final_check = strictly_shortest_under(g, p_star, check);
    Ok(PathAttackReport {
        cut: run.cut,
        iterations: run.iterations,
        generated_paths: run.pcs.paths().to_vec(),
        final_check,
        wall_time: start.elapsed(),
    })
}

/// True iff `p_star` is the unique shortest path in the subgraph induced by its own nodes,
/// which is exactly when some set of other nodes can be removed to make it unique.
pub fn check_node_removal_feasible(g: &Graph, p_star: &Path) -> bool {
    let mut r = Restriction::none(g);
    for v in 0..g.node_count() {
        if !p_star.contains_node(v) {
            r.block_node(v);
        }
    }
    strictly_shortest_under(g, p_star, r)
}

/// Node-removal instance: removing a node deletes all its incident edges.
#[derive(Debug, Clone)]
pub struct NodeAttackInstance {
    pub graph: Graph,
    pub p_star: Path,
    pub node_cost: Vec<f64>,
    pub protected_nodes: BTreeSet<NodeId>,
}

impl NodeAttackInstance {
    /// Node costs default to degree; the nodes of `p_star` (including both ends) are protected.
    pub fn new(graph: Graph, p_star: Path) -> Self {
        let node_cost = (0..graph.node_count()).map(|v| graph.degree(v) as f64).collect();
        let protected_nodes = p_star.nodes.iter().copied().collect();
        NodeAttackInstance {
            graph,
            p_star,
            node_cost,
            protected_nodes,
        }
    }

    pub fn with_costs(mut self, node_cost: Vec<f64>) -> Result<Self> {
        if node_cost.len() != self.graph.node_count() {
            return Err(Error::InvalidParameter("one cost per node required".into()));
        }
        if let Some(c) = node_cost.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::InvalidParameter(format!("node cost {c} is not a nonnegative number")));
        }
        self.node_cost = node_cost;
        Ok(self)
    }

    pub fn protect(mut self, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        self.protected_nodes.extend(nodes);
        self
    }
}

/// Finds nodes whose removal leaves `p_star` the unique shortest path.
pub fn pathattack_nodes(inst: &NodeAttackInstance, opts: &AttackOptions) -> Result<PathAttackReport> {
    let start = Instant::now();
    let g = &inst.graph;
    let p_star = &inst.p_star;
    if !p_star.is_consistent(g) {
        return Err(Error::InvalidPath("target path does not match the graph".into()));
    }
    if !check_node_removal_feasible(g, p_star) {
        return Err(Error::InfeasibleInstance(
            "the target path is not uniquely shortest among its own nodes".into(),
        ));
    }
    let mut protected = inst.protected_nodes.clone();
    protected.extend(p_star.nodes.iter().copied());
    let base = base_restriction(g, p_star.source(), opts.neighborhood);
    let pcs = PathConstraintSet::new(inst.node_cost.clone(), protected);
    let mut oracle = |cut: &BTreeSet<usize>| -> Result<Option<(Path, Vec<usize>)>> {
        let mut r = base.clone();
        for &v in cut {
            r.block_node(v);
        }
        Ok(next_competing_path_restricted(g, p_star, r)
            .filter(|p| not_longer(p.length, p_star.length))
            .map(|p| {
                let nodes = p.nodes.clone();
                (p, nodes)
            }))
    };
    let run = constraint_generation(pcs, &mut oracle, opts)?;
    let mut check = base.clone();
    for &v in &run.cut.cut {
        check.block_node(v);
    }
    let final_check = strictly_shortest_under(g, p_star, check);
    Ok(PathAttackReport {
        cut: run.cut,
        iterations: run.iterations,
        generated_paths: run.pcs.paths().to_vec(),
        final_check,
        wall_time: start.elapsed(),
    })
}
