//! Simple greedy attackers: repeatedly cut one edge of the current shortest competitor.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, Graph};
use crate::paths::{next_competing_path, not_longer, Path};

const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub removed: EdgeSet,
    pub cost: f64,
    pub iterations: usize,
    #[serde(with = "crate::attack::seconds")]
    pub wall_time: Duration,
}

/// Cuts `score`-best edges of competitors until `p_star` is strictly shortest.
/// `score` ranks edges higher-is-better.
fn greedy_loop(g: &Graph, p_star: &Path, keep: &EdgeSet, score: impl Fn(EdgeId) -> f64) -> Result<BaselineReport> {
    let start = Instant::now();
    if !p_star.is_consistent(g) {
        return Err(Error::InvalidPath("target path does not match the graph".into()));
    }
    let mut removed = EdgeSet::new();
    let mut iterations = 0;
    while let Some(p) = next_competing_path(g, p_star, &removed).filter(|p| not_longer(p.length, p_star.length)) {
        let pick = p
            .edges
            .iter()
            .copied()
            .filter(|e| !keep.contains(e) && !p_star.contains_edge(*e))
            .fold(None, |best: Option<(EdgeId, f64)>, e| {
                let s = score(e);
                match best {
                    Some((_, b)) if b >= s => best,
                    _ => Some((e, s)),
                }
            });
        let (e, _) = pick.ok_or(Error::Stuck)?;
        removed.insert(e);
        iterations += 1;
    }
    Ok(BaselineReport {
        cost: g.set_cost(removed.iter().copied()),
        removed,
        iterations,
        wall_time: start.elapsed(),
    })
}

/// Cuts the cheapest removable edge of each competitor; ties go to the lower edge id.
pub fn greedy_cost_baseline(g: &Graph, p_star: &Path, keep: &EdgeSet) -> Result<BaselineReport> {
    greedy_loop(g, p_star, keep, |e| -g.cost(e))
}

/// Cuts the competitor edge with the largest eigenscore per unit cost.
pub fn greedy_eigenscore_baseline(g: &Graph, p_star: &Path, keep: &EdgeSet) -> Result<BaselineReport> {
    let scores = eigenscores(g)?;
    greedy_loop(g, p_star, keep, |e| {
        let c = g.cost(e);
        if c > 0.0 {
            scores[e] / c
        } else {
            f64::INFINITY
        }
    })
}

/// Principal eigenvector of the symmetrized adjacency matrix, unit 2-norm and nonnegative.
///
/// Power iteration runs on `A + I`, which has the same eigenvectors and avoids
/// oscillation on bipartite graphs.
pub fn principal_eigenvector(g: &Graph) -> Result<Vec<f64>> {
    let n = g.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..POWER_MAX_ITERATIONS {
        let mut y = x.clone();
        for edge in g.edges() {
            y[edge.source] += x[edge.target];
            y[edge.target] += x[edge.source];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        let residual = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if residual < POWER_TOL {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence(POWER_MAX_ITERATIONS))
}

/// Per-edge product of the eigenvector entries at its endpoints.
pub fn eigenscores(g: &Graph) -> Result<Vec<f64>> {
    let x = principal_eigenvector(g)?;
    Ok(g.edges().iter().map(|e| x[e.source] * x[e.target]).collect())
}
