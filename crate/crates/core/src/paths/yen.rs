use std::collections::{BTreeMap, HashSet};

use crate::graph::{EdgeSet, Graph, NodeId};

use super::{shortest_path_restricted, Path, Restriction};

#[derive(Clone, PartialEq)]
struct Key(f64, Vec<NodeId>);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy enumeration of simple `s`–`t` paths in nondecreasing length (Yen's deviation method).
pub struct SimplePaths<'g> {
    g: &'g Graph,
    s: NodeId,
    t: NodeId,
    base: Restriction,
    found: Vec<Path>,
    seen: HashSet<Vec<NodeId>>,
    candidates: BTreeMap<Key, Path>,
    started: bool,
}

impl<'g> SimplePaths<'g> {
    pub fn new(g: &'g Graph, s: NodeId, t: NodeId, base: Restriction) -> Self {
        SimplePaths {
            g,
            s,
            t,
            base,
            found: Vec::new(),
            seen: HashSet::new(),
            candidates: BTreeMap::new(),
            started: false,
        }
    }

    fn push_candidate(&mut self, p: Path) {
        if self.seen.insert(p.nodes.clone()) {
            self.candidates.insert(Key(p.length, p.nodes.clone()), p);
        }
    }

    fn expand_last(&mut self) {
        let prev = self.found.last().expect("called after a path was found").clone();
        let mut r = self.base.clone();
        for i in 0..prev.edges.len() {
            let spur = prev.nodes[i];
            let root = &prev.nodes[..=i];
            let mut blocked = Vec::new();
            for p in &self.found {
                if p.nodes.len() > i + 1 && p.nodes[..=i] == *root && r.edge_allowed(p.edges[i]) {
                    r.block_edge(p.edges[i]);
                    blocked.push(p.edges[i]);
                }
            }
            for &v in &root[..i] {
                r.block_node(v);
            }
            if let Some(spur_path) = shortest_path_restricted(self.g, spur, self.t, &r) {
                let p = Path::concat(self.g, &[root, &spur_path.nodes]);
                self.push_candidate(p);
            }
            for &v in &root[..i] {
                if self.base.node_allowed(v) {
                    r.unblock_node(v);
                }
            }
            for e in blocked {
                r.edge_blocked[e] = self.base.edge_blocked[e];
            }
        }
    }
}

impl Iterator for SimplePaths<'_> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        if !self.started {
            self.started = true;
            if let Some(p) = shortest_path_restricted(self.g, self.s, self.t, &self.base) {
                self.push_candidate(p);
            }
        } else if !self.found.is_empty() {
            self.expand_last();
        }
        let (_, p) = self.candidates.pop_first()?;
        self.found.push(p.clone());
        Some(p)
    }
}

/// The first `k` simple `s`–`t` paths by nondecreasing length; shorter if fewer exist.
pub fn k_shortest_simple_paths(g: &Graph, s: NodeId, t: NodeId, k: usize) -> Vec<Path> {
    SimplePaths::new(g, s, t, Restriction::none(g)).take(k).collect()
}

/// Shortest `s`–`t` path other than `p_star` after deleting `removed`, or `None`
/// when `p_star` is the only remaining path. The caller compares lengths.
pub fn next_competing_path(g: &Graph, p_star: &Path, removed: &EdgeSet) -> Option<Path> {
    let r = Restriction::without_edges(g, removed);
    next_competing_path_restricted(g, p_star, r)
}

pub(crate) fn next_competing_path_restricted(g: &Graph, p_star: &Path, r: Restriction) -> Option<Path> {
    let mut paths = SimplePaths::new(g, p_star.source(), p_star.target(), r);
    let first = paths.next()?;
    if first != *p_star {
        return Some(first);
    }
    paths.next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Model};
    use crate::paths::tests::all_simple_paths;

    #[test]
    fn two_equal_routes() {
        let g = Graph::unweighted(false, 4, [(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let paths = k_shortest_simple_paths(&g, 0, 3, 2);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].length, paths[1].length);
        assert_ne!(paths[0], paths[1]);
    }

    #[test]
    fn chain_has_one_path() {
        let g = Graph::unweighted(false, 4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(k_shortest_simple_paths(&g, 0, 3, 5).len(), 1);
    }

    #[test]
    fn matches_enumeration_on_random_graphs() {
        for seed in 0..10 {
            let g = generate(&Model::Er { n: 10, p: 0.5 }, seed).unwrap();
            let g = crate::graph::assign_weights(
                &g,
                &crate::graph::WeightScheme::new(crate::graph::WeightKind::Uniform { lo: 1, hi: 9 }, seed),
            )
            .unwrap();
            let all = all_simple_paths(&g, 0, 9, &Restriction::none(&g));
            let got = k_shortest_simple_paths(&g, 0, 9, 10);
            assert_eq!(got.len(), all.len().min(10));
            for (a, b) in got.iter().zip(&all) {
                assert_eq!(a.length, b.length, "seed {seed}");
                assert!(a.is_consistent(&g));
            }
            let distinct: HashSet<_> = got.iter().map(|p| p.nodes.clone()).collect();
            assert_eq!(distinct.len(), got.len());
        }
    }

    #[test]
    fn only_path_gives_none() {
        let g = Graph::unweighted(false, 3, [(0, 1), (1, 2)]).unwrap();
        let p = Path::from_nodes(&g, &[0, 1, 2]).unwrap();
        assert!(next_competing_path(&g, &p, &EdgeSet::new()).is_none());
    }

    #[test]
    fn shorter_alternative_returned() {
        // p* = 0-1-2 (length 5), alternative 0-3-2 (length 4)
        let g = Graph::from_edges(
            false,
            4,
            [(0, 1, 2.5, 1.0), (1, 2, 2.5, 1.0), (0, 3, 2.0, 1.0), (3, 2, 2.0, 1.0)],
        )
        .unwrap();
        let p_star = Path::from_nodes(&g, &[0, 1, 2]).unwrap();
        let alt = next_competing_path(&g, &p_star, &EdgeSet::new()).unwrap();
        assert_eq!(alt.nodes, vec![0, 3, 2]);
        assert_eq!(alt.length, 4.0);
    }

    #[test]
    fn competing_path_cross_check() {
        for seed in 0..10 {
            let g = generate(&Model::Er { n: 12, p: 0.3 }, 100 + seed).unwrap();
            let paths = k_shortest_simple_paths(&g, 0, 11, 3);
            if paths.len() < 2 {
                continue;
            }
            let p_star = &paths[1];
            let got = next_competing_path(&g, p_star, &EdgeSet::new()).unwrap();
            let all = all_simple_paths(&g, 0, 11, &Restriction::none(&g));
            let expected = all.iter().find(|p| *p != p_star).unwrap();
            assert_eq!(got.length, expected.length);
            assert_eq!(got, paths[0]);
        }
    }
}
