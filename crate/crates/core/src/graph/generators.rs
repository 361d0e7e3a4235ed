use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Graph, NodeId};

/// 2x2 initiator for stochastic Kronecker graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KroneckerInitiator(pub [[f64; 2]; 2]);

impl Default for KroneckerInitiator {
    fn default() -> Self {
        KroneckerInitiator([[0.9, 0.6], [0.6, 0.2]])
    }
}

/// Random and deterministic graph models. All generated edges get unit weight and cost;
/// use [`super::assign_weights`] afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    /// Undirected Erdős–Rényi G(n, p).
    Er { n: usize, p: f64 },
    /// Directed Erdős–Rényi over ordered pairs.
    Der { n: usize, p: f64 },
    /// Barabási–Albert preferential attachment, `m` edges per new node.
    Ba { n: usize, m: usize },
    /// Watts–Strogatz ring of degree `k` with rewiring probability `beta`.
    Ws { n: usize, k: usize, beta: f64 },
    /// Stochastic Kronecker graph with `2^scale` nodes.
    Kron {
        scale: u32,
        #[serde(default)]
        initiator: KroneckerInitiator,
    },
    /// `rows x cols` 4-neighbor lattice.
    Lat { rows: usize, cols: usize },
    /// Complete graph.
    Comp { n: usize },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {p} is not a probability")))
    }
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Er { p, .. } | Model::Der { p, .. } => check_probability("p", p),
            Model::Ba { n, m } => {
                if m == 0 || m >= n {
                    Err(invalid(format!("BA needs 1 <= m < n, got m={m}, n={n}")))
                } else {
                    Ok(())
                }
            }
            Model::Ws { n, k, beta } => {
                check_probability("beta", beta)?;
                if k < 2 || k % 2 != 0 || k >= n {
                    Err(invalid(format!("WS needs even 2 <= k < n, got k={k}, n={n}")))
                } else {
                    Ok(())
                }
            }
            Model::Kron { scale, initiator } => {
                if scale == 0 || scale > 24 {
                    return Err(invalid(format!("KRON scale {scale} outside 1..=24")));
                }
                for row in initiator.0 {
                    for v in row {
                        check_probability("initiator entry", v)?;
                    }
                }
                Ok(())
            }
            Model::Lat { rows, cols } => {
                if rows == 0 || cols == 0 {
                    Err(invalid("lattice dimensions must be positive"))
                } else {
                    Ok(())
                }
            }
            Model::Comp { n } => {
                if n == 0 {
                    Err(invalid("complete graph needs n >= 1"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, Model::Der { .. })
    }

    /// Short model name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Model::Er { .. } => "ER",
            Model::Der { .. } => "DER",
            Model::Ba { .. } => "BA",
            Model::Ws { .. } => "WS",
            Model::Kron { .. } => "KRON",
            Model::Lat { .. } => "LAT",
            Model::Comp { .. } => "COMP",
        }
    }
}

/// Generates a graph from `model`. The result is a deterministic function of `(model, seed)`.
pub fn generate(model: &Model, seed: u64) -> Result<Graph> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = |(u, v): (NodeId, NodeId)| (u, v, 1.0, 1.0);
    match *model {
        Model::Er { n, p } => {
            let mut edges = Vec::new();
            if p > 0.0 {
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.gen::<f64>() < p {
                            edges.push((u, v));
                        }
                    }
                }
            }
            Graph::from_edges(false, n, edges.into_iter().map(unit))
        }
        Model::Der { n, p } => {
            let mut edges = Vec::new();
            if p > 0.0 {
                for u in 0..n {
                    for v in 0..n {
                        if u != v && rng.gen::<f64>() < p {
                            edges.push((u, v));
                        }
                    }
                }
            }
            Graph::from_edges(true, n, edges.into_iter().map(unit))
        }
        Model::Ba { n, m } => Graph::from_edges(false, n, barabasi_albert(n, m, &mut rng).into_iter().map(unit)),
        Model::Ws { n, k, beta } => {
            Graph::from_edges(false, n, watts_strogatz(n, k, beta, &mut rng).into_iter().map(unit))
        }
        Model::Kron { scale, initiator } => {
            let n = 1usize << scale;
            Graph::from_edges(false, n, kronecker(scale, &initiator, &mut rng).into_iter().map(unit))
        }
        Model::Lat { rows, cols } => {
            let mut edges = Vec::with_capacity(2 * rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    let id = r * cols + c;
                    if c + 1 < cols {
                        edges.push((id, id + 1));
                    }
                    if r + 1 < rows {
                        edges.push((id, id + cols));
                    }
                }
            }
            Graph::from_edges(false, rows * cols, edges.into_iter().map(unit))
        }
        Model::Comp { n } => {
            let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::from_edges(false, n, edges.map(unit))
        }
    }
}

/// Starts from a star on `m + 1` nodes; every later node attaches to `m` distinct
/// targets drawn proportionally to degree. Produces exactly `(n - m) * m` edges.
fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let mut edges: Vec<(NodeId, NodeId)> = (1..=m).map(|v| (0, v)).collect();
    let mut repeated: Vec<NodeId> = Vec::with_capacity(2 * n * m);
    repeated.extend(std::iter::repeat_n(0, m));
    repeated.extend(1..=m);
    for source in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(*repeated.choose(rng).expect("nonempty"));
        }
        for &t in &targets {
            edges.push((t, source));
            repeated.push(t);
        }
        repeated.extend(std::iter::repeat_n(source, m));
    }
    edges
}

fn watts_strogatz(n: usize, k: usize, beta: f64, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let key = |u: NodeId, v: NodeId| if u < v { (u, v) } else { (v, u) };
    let mut adj: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || rng.gen::<f64>() >= beta {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let mut edges = BTreeSet::new();
    for (u, list) in adj.iter().enumerate() {
        for &v in list {
            edges.insert(key(u, v));
        }
    }
    edges.into_iter().collect()
}

/// Ball-dropping sampler: draws `round((sum of initiator)^scale)` directed pairs by
/// descending the Kronecker recursion, then symmetrizes and drops self-loops and repeats.
fn kronecker(scale: u32, init: &KroneckerInitiator, rng: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    let cells = [
        (0usize, 0usize, init.0[0][0]),
        (0, 1, init.0[0][1]),
        (1, 0, init.0[1][0]),
        (1, 1, init.0[1][1]),
    ];
    let total: f64 = cells.iter().map(|c| c.2).sum();
    if total <= 0.0 {
        return Vec::new();
    }
    let draws = total.powi(scale as i32).round() as usize;
    let mut edges = BTreeSet::new();
    for _ in 0..draws {
        let (mut u, mut v) = (0usize, 0usize);
        for _ in 0..scale {
            let mut r = rng.gen::<f64>() * total;
            let mut chosen = cells[3];
            for cell in cells {
                if r < cell.2 {
                    chosen = cell;
                    break;
                }
                r -= cell.2;
            }
            u = 2 * u + chosen.0;
            v = 2 * v + chosen.1;
        }
        if u != v {
            edges.insert(if u < v { (u, v) } else { (v, u) });
        }
    }
    edges.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_counts() {
        let g = generate(&Model::Comp { n: 565 }, 0).unwrap();
        assert_eq!(g.node_count(), 565);
        assert_eq!(g.edge_count(), 159_330);
    }

    #[test]
    fn lattice_counts() {
        let g = generate(&Model::Lat { rows: 285, cols: 285 }, 0).unwrap();
        assert_eq!(g.node_count(), 81_225);
        assert_eq!(g.edge_count(), 161_880);
    }

    #[test]
    fn empty_er() {
        let g = generate(&Model::Er { n: 50, p: 0.0 }, 3).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (50, 0));
    }

    #[test]
    fn ba_edge_count_is_exact() {
        for seed in 0..5 {
            let g = generate(&Model::Ba { n: 300, m: 4 }, seed).unwrap();
            assert_eq!(g.edge_count(), (300 - 4) * 4);
        }
    }

    #[test]
    fn ws_keeps_edge_count() {
        let g = generate(&Model::Ws { n: 200, k: 6, beta: 0.3 }, 9).unwrap();
        assert_eq!(g.edge_count(), 600);
    }

    #[test]
    fn er_count_within_three_sigma() {
        let (n, p) = (300usize, 0.05);
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        for seed in 0..5 {
            let m = generate(&Model::Er { n, p }, seed).unwrap().edge_count() as f64;
            assert!((m - mean).abs() <= 3.0 * sd, "seed {seed}: {m} vs {mean}");
        }
        let pairs = (n * (n - 1)) as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        let g = generate(&Model::Der { n, p }, 1).unwrap();
        assert!(g.is_directed());
        assert!((g.edge_count() as f64 - mean).abs() <= 3.0 * sd);
    }

    #[test]
    fn kronecker_node_count_and_determinism() {
        let model = Model::Kron {
            scale: 8,
            initiator: KroneckerInitiator::default(),
        };
        let a = generate(&model, 5).unwrap();
        let b = generate(&model, 5).unwrap();
        assert_eq!(a.node_count(), 256);
        assert!(a.edge_count() > 0);
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate(&Model::Er { n: 5, p: 1.5 }, 0).is_err());
        assert!(generate(&Model::Ba { n: 5, m: 5 }, 0).is_err());
        assert!(generate(&Model::Ws { n: 10, k: 3, beta: 0.1 }, 0).is_err());
    }

    #[test]
    fn same_seed_same_graph() {
        let m = Model::Er { n: 40, p: 0.2 };
        assert_eq!(generate(&m, 11).unwrap(), generate(&m, 11).unwrap());
        assert_ne!(generate(&m, 11).unwrap(), generate(&m, 12).unwrap());
    }
}
