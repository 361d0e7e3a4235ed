//! Seeded experiment batches: build a graph per trial, pick terminals and a target,
//! run each configured algorithm, validate its cut, and record the outcome.

mod report;

use std::path::{Path as FsPath, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{is_strictly_shortest, pathattack, AttackOptions};
use crate::baselines::{greedy_cost_baseline, greedy_eigenscore_baseline};
use crate::cover::CoverEngine;
use crate::error::{Error, Result};
use crate::fixtures::bottleneck;
use crate::graph::{assign_weights, generate, load_edge_list, CostRule, EdgeId, EdgeSet, Graph, LoadOptions, Model, NodeId, WeightKind, WeightScheme};
use crate::oracles::{brute_force_path_cut, brute_force_target_cut};
use crate::paths::{bfs_depths, k_shortest_simple_paths, Path, Restriction, SimplePaths};
use crate::target::{combinatorial_search, heuristic_search, is_valid_target_cut, Target, TargetCutInstance, TimeLimits};

pub use report::{render_report, summarize, write_report, AlgorithmSummary, ReportFormat};

/// Environment variable holding the default number of trial workers.
pub const WORKERS_ENV: &str = "PATHCUT_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BottleneckSpec {
    pub k: usize,
    pub c_min: f64,
    pub c_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    File {
        file: PathBuf,
        #[serde(default)]
        directed: bool,
    },
    /// The bottleneck fixture, with its own terminals and target edge.
    Bottleneck { bottleneck: BottleneckSpec },
    Generated(Model),
}

impl GraphSource {
    fn describe(&self) -> String {
        match self {
            GraphSource::File { file, .. } => file.display().to_string(),
            GraphSource::Bottleneck { bottleneck: b } => format!("bottleneck(k={})", b.k),
            GraphSource::Generated(m) => m.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalRule {
    #[default]
    Uniform,
    HopDistance(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    #[default]
    Path,
    Edge,
    Node,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    GreedyCost,
    GreedyEigenscore,
    PathattackGreedy,
    PathattackRand,
    /// Target problems only.
    Combinatorial,
    /// Target problems only.
    Heuristic,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GreedyCost => "greedy_cost",
            Algorithm::GreedyEigenscore => "greedy_eigenscore",
            Algorithm::PathattackGreedy => "pathattack_greedy",
            Algorithm::PathattackRand => "pathattack_rand",
            Algorithm::Combinatorial => "combinatorial",
            Algorithm::Heuristic => "heuristic",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Algorithm::GreedyCost,
            Algorithm::GreedyEigenscore,
            Algorithm::PathattackGreedy,
            Algorithm::PathattackRand,
            Algorithm::Combinatorial,
            Algorithm::Heuristic,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeLimitConfig {
    pub per_solve_secs: f64,
    pub per_budget_secs: f64,
    pub total_secs: f64,
}

impl Default for TimeLimitConfig {
    fn default() -> Self {
        let d = TimeLimits::default();
        TimeLimitConfig {
            per_solve_secs: d.per_solve.as_secs_f64(),
            per_budget_secs: d.per_budget.as_secs_f64(),
            total_secs: d.total.as_secs_f64(),
        }
    }
}

impl TimeLimitConfig {
    pub fn to_limits(self) -> Result<TimeLimits> {
        let secs = |v: f64| {
            Duration::try_from_secs_f64(v).map_err(|_| Error::Config(format!("time limit {v} is not a nonnegative number")))
        };
        Ok(TimeLimits {
            per_solve: secs(self.per_solve_secs)?,
            per_budget: secs(self.per_budget_secs)?,
            total: secs(self.total_secs)?,
        })
    }
}

fn default_name() -> String {
    "experiment".into()
}

fn default_one() -> usize {
    1
}

fn default_rank() -> usize {
    10
}

fn default_skip() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub graph: GraphSource,
    /// Redraw weights per trial; `None` keeps the graph's own weights.
    #[serde(default)]
    pub weights: Option<WeightKind>,
    #[serde(default)]
    pub costs: CostRule,
    #[serde(default = "default_one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub problem: ProblemKind,
    /// Rank of the target path among the shortest simple paths (path problems).
    #[serde(default = "default_rank")]
    pub p_star_rank: usize,
    #[serde(default)]
    pub terminals: TerminalRule,
    /// Which off-path element becomes the target (edge and node problems).
    #[serde(default = "default_skip")]
    pub target_skip: usize,
    pub algorithms: Vec<Algorithm>,
    /// Compare against exhaustive search when at most this many candidate edges remain.
    #[serde(default)]
    pub oracle_max_edges: Option<usize>,
    #[serde(default)]
    pub time_limits: TimeLimitConfig,
    /// Trial workers; defaults to the environment variable, then 1.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.p_star_rank == 0 {
            return Err(Error::Config("p_star_rank must be at least 1".into()));
        }
        if self.target_skip == 0 {
            return Err(Error::Config("target_skip must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms configured".into()));
        }
        if let GraphSource::Generated(m) = &self.graph {
            m.validate()?;
        }
        self.time_limits.to_limits()?;
        Ok(())
    }

    fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()))
            .unwrap_or(1)
            .max(1)
    }
}

/// Picks source and destination.
///
/// `Uniform` draws an ordered pair of distinct nodes. `HopDistance(h)` tries sources
/// in random order and returns the first with nodes exactly `h` hops away, choosing
/// one of those uniformly.
pub fn select_terminals(g: &Graph, rule: TerminalRule, seed: u64) -> Result<(NodeId, NodeId)> {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rule {
        TerminalRule::Uniform => {
            if n < 2 {
                return Err(Error::InvalidParameter("need at least two nodes".into()));
            }
            let s = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n - 1);
            if t >= s {
                t += 1;
            }
            Ok((s, t))
        }
        TerminalRule::HopDistance(h) => {
            let mut sources: Vec<NodeId> = (0..n).collect();
            sources.shuffle(&mut rng);
            let r = Restriction::none(g);
            for s in sources {
                let far: Vec<NodeId> = bfs_depths(g, s, &r)
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d == Some(h))
                    .map(|(v, _)| v)
                    .collect();
                if let Some(&t) = far.choose(&mut rng) {
                    if t != s {
                        return Ok((s, t));
                    }
                }
            }
            Err(Error::NoCandidate(h))
        }
    }
}

/// Walks the shortest simple paths in order and returns the `skip`-th edge (or node)
/// not on the initial shortest path, counting from 1 in first-seen order.
pub fn select_target_element(g: &Graph, s: NodeId, t: NodeId, kind: ProblemKind, skip: usize) -> Result<Target> {
    if kind == ProblemKind::Path {
        return Err(Error::InvalidParameter("path problems have no target element".into()));
    }
    if skip == 0 {
        return Err(Error::InvalidParameter("skip counts from 1".into()));
    }
    let mut paths = SimplePaths::new(g, s, t, Restriction::none(g));
    let first = paths.next().ok_or(Error::Exhausted)?;
    let mut seen: Vec<usize> = Vec::new();
    for p in paths {
        let elements = match kind {
            ProblemKind::Edge => p.edges.clone(),
            _ => p.nodes.clone(),
        };
        for x in elements {
            let on_first = match kind {
                ProblemKind::Edge => first.contains_edge(x),
                _ => first.contains_node(x),
            };
            if !on_first && !seen.contains(&x) {
                seen.push(x);
                if seen.len() == skip {
                    return Ok(match kind {
                        ProblemKind::Edge => Target::Edge(x),
                        _ => Target::Node(x),
                    });
                }
            }
        }
    }
    Err(Error::Exhausted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Failed { kind: String, message: String },
}

impl Outcome {
    fn from_error(e: &Error) -> Self {
        Outcome::Failed {
            kind: error_kind(e).into(),
            message: e.to_string(),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Outcome::Ok)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InfeasibleCover | Error::InfeasibleInstance(_) => "infeasible",
        Error::Stuck => "stuck",
        Error::Exhausted => "exhausted",
        Error::NoCandidate(_) => "no_candidate",
        Error::TimedOut => "timed_out",
        Error::IterationCap(_) => "iteration_cap",
        Error::ResourceExhausted(_) => "resource_exhausted",
        Error::NonConvergence(_) => "non_convergence",
        Error::NumericalInstability(_) => "numerical",
        Error::TooLarge { .. } => "too_large",
        _ => "error",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmResult {
    pub algorithm: Algorithm,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub cost: Option<f64>,
    /// Cost divided by the greedy-cost baseline's cost in the same trial.
    pub cost_ratio: Option<f64>,
    pub valid: bool,
    pub optimal: Option<bool>,
    pub iterations: usize,
    pub timed_out: bool,
    pub removed: Vec<EdgeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub graph_id: String,
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub s: Option<NodeId>,
    pub t: Option<NodeId>,
    pub target: Option<Target>,
    pub p_star_length: Option<f64>,
    pub p_star_hops: Option<usize>,
    pub oracle_cost: Option<f64>,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub results: Vec<AlgorithmResult>,
}

impl TrialRecord {
    /// Copy with all wall-clock fields removed, for reproducible dumps.
    pub fn without_timing(&self) -> TrialRecord {
        let mut r = self.clone();
        for a in &mut r.results {
            a.wall_time_secs = None;
        }
        r
    }
}

/// Per-trial seeds, drawn from one stream so each trial is independent of worker scheduling.
fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| rng.gen()).collect()
}

struct Setup {
    graph: Graph,
    s: NodeId,
    t: NodeId,
    target: Option<Target>,
    p_star: Path,
}

/// Terminals and target fixed by the graph source itself.
type FixedEnds = Option<(NodeId, NodeId, Target)>;

fn build_graph(cfg: &ExperimentConfig, seed: u64) -> Result<(Graph, FixedEnds)> {
    let (g, fixed) = match &cfg.graph {
        GraphSource::Generated(m) => (generate(m, seed)?, None),
        GraphSource::File { file, directed } => {
            let opts = LoadOptions {
                directed: *directed,
                skip_duplicates: true,
                skip_self_loops: true,
                ..Default::default()
            };
            (load_edge_list(file, &opts)?, None)
        }
        GraphSource::Bottleneck { bottleneck: b } => {
            let f = bottleneck(b.k, b.c_min, b.c_max);
            (f.graph, Some((f.s, f.t, Target::Edge(f.target))))
        }
    };
    let g = match cfg.weights {
        Some(kind) => assign_weights(
            &g,
            &WeightScheme {
                kind,
                seed: seed.wrapping_add(1),
                costs: cfg.costs,
            },
        )?,
        None => g,
    };
    Ok((g, fixed))
}

fn setup_trial(cfg: &ExperimentConfig, seed: u64, graph: Graph, fixed: FixedEnds) -> Result<Setup> {
    let (s, t, target) = match fixed {
        Some((s, t, target)) => (s, t, Some(target)),
        None => {
            let (s, t) = select_terminals(&graph, cfg.terminals, seed.wrapping_add(2))?;
            let target = match cfg.problem {
                ProblemKind::Path => None,
                kind => Some(select_target_element(&graph, s, t, kind, cfg.target_skip)?),
            };
            (s, t, target)
        }
    };
    let p_star = match target {
        None => k_shortest_simple_paths(&graph, s, t, cfg.p_star_rank)
            .into_iter()
            .nth(cfg.p_star_rank - 1)
            .ok_or(Error::Exhausted)?,
        Some(target) => crate::paths::shortest_path_via(&graph, s, t, target, &EdgeSet::new())
            .ok_or_else(|| Error::InfeasibleInstance("no path passes through the target".into()))?,
    };
    Ok(Setup {
        graph,
        s,
        t,
        target,
        p_star,
    })
}

fn run_algorithm(cfg: &ExperimentConfig, setup: &Setup, alg: Algorithm, seed: u64) -> AlgorithmResult {
    let start = Instant::now();
    let g = &setup.graph;
    let keep = EdgeSet::new();
    let attack = |engine| pathattack(g, &setup.p_star, &keep, &AttackOptions::new(engine, seed));
    let target_inst = |target: Target| -> Result<TargetCutInstance> {
        Ok(TargetCutInstance::new(g.clone(), setup.s, setup.t, target)?
            .with_time_limits(cfg.time_limits.to_limits()?)
            .with_engine(CoverEngine::Rand, seed))
    };
    let run: Result<(EdgeSet, usize, bool)> = match (alg, setup.target) {
        (Algorithm::GreedyCost, _) => greedy_cost_baseline(g, &setup.p_star, &keep).map(|r| (r.removed, r.iterations, false)),
        (Algorithm::GreedyEigenscore, _) => greedy_eigenscore_baseline(g, &setup.p_star, &keep).map(|r| (r.removed, r.iterations, false)),
        (Algorithm::PathattackGreedy, _) => attack(CoverEngine::Greedy).map(|r| (r.cut.cut, r.iterations, false)),
        (Algorithm::PathattackRand, _) => attack(CoverEngine::Rand).map(|r| (r.cut.cut, r.iterations, false)),
        (Algorithm::Combinatorial | Algorithm::Heuristic, None) => {
            Err(Error::InvalidParameter(format!("{} needs an edge or node target", alg.name())))
        }
        (Algorithm::Combinatorial, Some(target)) => {
            target_inst(target).and_then(|i| combinatorial_search(&i)).map(|s| (s.removed, s.iterations, s.timed_out))
        }
        (Algorithm::Heuristic, Some(target)) => {
            target_inst(target).and_then(|i| heuristic_search(&i)).map(|s| (s.removed, s.iterations, s.timed_out))
        }
    };
    let wall = Some(start.elapsed().as_secs_f64());
    match run {
        Ok((removed, iterations, timed_out)) => {
            let valid = match setup.target {
                None => is_strictly_shortest(g, &setup.p_star, &removed),
                Some(target) => is_valid_target_cut(g, setup.s, setup.t, target, &removed),
            };
            AlgorithmResult {
                algorithm: alg,
                outcome: Outcome::Ok,
                cost: Some(g.set_cost(removed.iter().copied())),
                cost_ratio: None,
                valid,
                optimal: None,
                iterations,
                timed_out,
                removed: removed.into_iter().collect(),
                wall_time_secs: wall,
            }
        }
        Err(e) => AlgorithmResult {
            algorithm: alg,
            outcome: Outcome::from_error(&e),
            cost: None,
            cost_ratio: None,
            valid: false,
            optimal: None,
            iterations: 0,
            timed_out: matches!(e, Error::TimedOut),
            removed: Vec::new(),
            wall_time_secs: wall,
        },
    }
}

fn oracle_cost(cfg: &ExperimentConfig, setup: &Setup) -> Option<f64> {
    let max = cfg.oracle_max_edges?;
    let exact = match setup.target {
        None => brute_force_path_cut(&setup.graph, &setup.p_star, &EdgeSet::new(), max),
        Some(target) => brute_force_target_cut(&setup.graph, setup.s, setup.t, target, max),
    };
    exact.ok().map(|c| c.cost)
}

/// Cost ratio against the greedy-cost baseline: 1 when both are zero.
pub fn cost_ratio(cost: f64, baseline: f64) -> Option<f64> {
    if baseline > 0.0 {
        Some(cost / baseline)
    } else if cost == 0.0 {
        Some(1.0)
    } else {
        None
    }
}

fn run_trial(cfg: &ExperimentConfig, trial: usize, seed: u64) -> Result<TrialRecord> {
    let (graph, fixed) = build_graph(cfg, seed)?;
    let mut record = TrialRecord {
        trial,
        graph_id: format!("{}#{trial}", cfg.graph.describe()),
        seed,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        s: None,
        t: None,
        target: None,
        p_star_length: None,
        p_star_hops: None,
        oracle_cost: None,
        outcome: Outcome::Ok,
        results: Vec::new(),
    };
    let setup = match setup_trial(cfg, seed, graph, fixed) {
        Ok(s) => s,
        Err(e) => {
            record.outcome = Outcome::from_error(&e);
            return Ok(record);
        }
    };
    record.s = Some(setup.s);
    record.t = Some(setup.t);
    record.target = setup.target;
    record.p_star_length = Some(setup.p_star.length);
    record.p_star_hops = Some(setup.p_star.hops());
    record.oracle_cost = oracle_cost(cfg, &setup);
    let tolerance = match setup.target {
        Some(_) => 1e-6 * setup.graph.total_cost(),
        None => 1e-9,
    };
    for (i, &alg) in cfg.algorithms.iter().enumerate() {
        let mut result = run_algorithm(cfg, &setup, alg, seed.wrapping_add(100 + i as u64));
        if let (Some(cost), Some(opt)) = (result.cost, record.oracle_cost) {
            result.optimal = Some((cost - opt).abs() <= tolerance * opt.abs().max(1.0));
        }
        record.results.push(result);
    }
    let baseline = record
        .results
        .iter()
        .find(|r| r.algorithm == Algorithm::GreedyCost)
        .and_then(|r| r.cost);
    if let Some(b) = baseline {
        for r in &mut record.results {
            r.cost_ratio = r.cost.and_then(|c| cost_ratio(c, b));
        }
    }
    Ok(record)
}

/// Runs every trial. Individual trial failures are recorded in the records; only
/// configuration problems (such as an unreadable graph file) are returned as errors.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let seeds = trial_seeds(cfg.seed, cfg.trials);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(trial, &seed)| run_trial(cfg, trial, seed))
            .collect()
    })
}
