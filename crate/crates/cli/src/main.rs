use std::path::PathBuf;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pathcut::attack::{pathattack, AttackOptions};
use pathcut::cover::CoverEngine;
use pathcut::experiment::{render_report, run_experiment, summarize, ExperimentConfig, ReportFormat, TrialRecord, WORKERS_ENV};
use pathcut::graph::{
    assign_weights, generate, load_edge_list, save_edge_list, CostRule, EdgeListFormat, EdgeSet, Graph, KroneckerInitiator, LoadOptions, Model,
    NodeId, WeightKind, WeightScheme,
};
use pathcut::paths::{k_shortest_simple_paths, Path};
use pathcut::target::{target_cut_search, SearchMode, Target, TargetCutInstance, TimeLimits};

#[derive(Parser)]
#[command(name = "pathcut", version, about = "Force a path, edge, or node onto the unique shortest route by cutting edges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random or structured graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Make a given path the unique shortest path.
    AttackPath(AttackPathArgs),
    /// Make every shortest path use a given edge.
    AttackEdge(TargetArgs),
    /// Make every shortest path pass a given node.
    AttackNode(TargetArgs),
    /// Run a seeded batch of trials from a TOML config.
    Experiment(ExperimentArgs),
    /// Summarize or convert a raw JSON dump.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// er, der, ba, ws, kron, lat, or comp.
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    scale: Option<u32>,
    /// Kronecker initiator as four comma-separated entries, row major.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    initiator: Option<Vec<f64>>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// equal, poisson:RATE, or uniform:LO:HI.
    #[arg(long, default_value = "equal")]
    weights: String,
    /// Set every removal cost to 1 instead of the weight.
    #[arg(long)]
    unit_costs: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list, whitespace or `.csv`.
    #[arg(long)]
    graph: PathBuf,
    /// Treat the edge list as directed unless the file says otherwise.
    #[arg(long)]
    directed: bool,
    #[arg(long)]
    unit_costs: bool,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        let opts = LoadOptions {
            format: EdgeListFormat::from_path(&self.graph),
            directed: self.directed,
            skip_duplicates: true,
            skip_self_loops: true,
            unit_costs: self.unit_costs,
        };
        load_edge_list(&self.graph, &opts).with_context(|| format!("loading {}", self.graph.display()))
    }
}

#[derive(Args)]
struct AttackPathArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Comma-separated node labels of the path to force.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["source", "dest", "rank"])]
    path: Option<Vec<String>>,
    #[arg(long, requires = "dest")]
    source: Option<String>,
    #[arg(long, requires = "source")]
    dest: Option<String>,
    /// Use the rank-th shortest source-destination path.
    #[arg(long, default_value_t = 10)]
    rank: usize,
    /// greedy, rand, or exact.
    #[arg(long, default_value = "rand")]
    engine: CoverEngine,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TargetArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    source: String,
    #[arg(long)]
    dest: String,
    /// Edge as `u,v` (edge problems only).
    #[arg(long)]
    target_edge: Option<String>,
    /// Node label (node problems only).
    #[arg(long)]
    target_node: Option<String>,
    #[arg(long, default_value = "heuristic")]
    mode: SearchMode,
    /// Absolute search tolerance; defaults to 1e-6 times the total cost.
    #[arg(long)]
    eps: Option<f64>,
    /// Total search time in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    per_solve: Option<f64>,
    #[arg(long)]
    per_budget: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    /// Raw dump path; overrides the config. The format follows the extension.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    with_timing: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Raw JSON dump written by `experiment`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "markdown")]
    format: ReportFormat,
    #[arg(long)]
    with_timing: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn need<T>(v: Option<T>, flag: &str, model: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("--{flag} is required for model {model}"))
}

fn model_from_args(a: &GenerateArgs) -> Result<Model> {
    let name = a.model.to_ascii_lowercase();
    let m = name.as_str();
    Ok(match m {
        "er" => Model::Er { n: need(a.n, "n", m)?, p: need(a.p, "p", m)? },
        "der" => Model::Der { n: need(a.n, "n", m)?, p: need(a.p, "p", m)? },
        "ba" => Model::Ba { n: need(a.n, "n", m)?, m: need(a.m, "m", m)? },
        "ws" => Model::Ws {
            n: need(a.n, "n", m)?,
            k: need(a.k, "k", m)?,
            beta: need(a.beta, "beta", m)?,
        },
        "kron" => Model::Kron {
            scale: need(a.scale, "scale", m)?,
            initiator: match &a.initiator {
                Some(v) => KroneckerInitiator([[v[0], v[1]], [v[2], v[3]]]),
                None => KroneckerInitiator::default(),
            },
        },
        "lat" => Model::Lat {
            rows: need(a.rows, "rows", m)?,
            cols: need(a.cols, "cols", m)?,
        },
        "comp" => Model::Comp { n: need(a.n, "n", m)? },
        other => bail!("unknown model `{other}`"),
    })
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let model = model_from_args(&a)?;
    let g = generate(&model, a.seed)?;
    let scheme = WeightScheme {
        kind: WeightKind::parse(&a.weights)?,
        seed: a.seed.wrapping_add(1),
        costs: if a.unit_costs { CostRule::Unit } else { CostRule::Weight },
    };
    let g = assign_weights(&g, &scheme)?;
    save_edge_list(&g, &a.output, EdgeListFormat::from_path(&a.output))?;
    eprintln!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), a.output.display());
    Ok(())
}

fn node(g: &Graph, label: &str) -> Result<NodeId> {
    g.node_by_label(label).ok_or_else(|| anyhow!("no node labelled `{label}`"))
}

fn labels(g: &Graph, edges: &EdgeSet) -> Vec<(String, String)> {
    edges
        .iter()
        .map(|&e| {
            let edge = g.edge(e);
            (g.label(edge.source).to_string(), g.label(edge.target).to_string())
        })
        .collect()
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn cmd_attack_path(a: AttackPathArgs) -> Result<()> {
    let g = a.graph.load()?;
    let p_star = match (&a.path, &a.source, &a.dest) {
        (Some(p), _, _) => {
            let refs: Vec<&str> = p.iter().map(String::as_str).collect();
            Path::from_labels(&g, &refs)?
        }
        (None, Some(s), Some(t)) => {
            if a.rank == 0 {
                bail!("--rank counts from 1");
            }
            k_shortest_simple_paths(&g, node(&g, s)?, node(&g, t)?, a.rank)
                .into_iter()
                .nth(a.rank - 1)
                .ok_or_else(|| anyhow!("fewer than {} simple paths", a.rank))?
        }
        _ => bail!("give either --path or --source and --dest"),
    };
    let report = pathattack(&g, &p_star, &EdgeSet::new(), &AttackOptions::new(a.engine, a.seed))?;
    let cut: EdgeSet = report.cut.cut.iter().copied().collect();
    print_json(&serde_json::json!({
        "path": p_star.describe(&g),
        "path_length": p_star.length,
        "engine": a.engine.name(),
        "cost": report.cut.total_cost,
        "removed": labels(&g, &cut),
        "iterations": report.iterations,
        "constraints": report.generated_paths.len(),
        "valid": report.final_check,
    }))
}

fn cmd_attack_target(a: TargetArgs, node_problem: bool) -> Result<()> {
    let g = a.graph.load()?;
    let s = node(&g, &a.source)?;
    let t = node(&g, &a.dest)?;
    let target = if node_problem {
        let v = a.target_node.as_deref().ok_or_else(|| anyhow!("--target-node is required"))?;
        Target::Node(node(&g, v)?)
    } else {
        let text = a.target_edge.as_deref().ok_or_else(|| anyhow!("--target-edge is required"))?;
        let (u, v) = text.split_once(',').ok_or_else(|| anyhow!("--target-edge expects u,v"))?;
        let (u, v) = (node(&g, u.trim())?, node(&g, v.trim())?);
        Target::Edge(g.find_edge(u, v).ok_or_else(|| anyhow!("no edge {text}"))?)
    };
    let defaults = TimeLimits::default();
    let secs = |v: Option<f64>, d: Duration| -> Result<Duration> {
        v.map(|s| Duration::try_from_secs_f64(s).map_err(|e| anyhow!("bad time limit {s}: {e}"))).unwrap_or(Ok(d))
    };
    let limits = TimeLimits {
        per_solve: secs(a.per_solve, defaults.per_solve)?,
        per_budget: secs(a.per_budget, defaults.per_budget)?,
        total: secs(a.time_limit, defaults.total)?,
    };
    let mut inst = TargetCutInstance::new(g.clone(), s, t, target)?
        .with_time_limits(limits)
        .with_engine(CoverEngine::Rand, a.seed);
    if let Some(eps) = a.eps {
        inst = inst.with_eps(eps);
    }
    let sol = target_cut_search(&inst, a.mode)?;
    print_json(&serde_json::json!({
        "mode": a.mode,
        "cost": sol.cost,
        "removed": labels(&g, &sol.removed),
        "through_path": sol.through_path.as_ref().map(|p| p.describe(&g)),
        "lower_bound": sol.lower_bound,
        "upper_bound": sol.upper_bound,
        "iterations": sol.iterations,
        "pathattack_calls": sol.pathattack_calls,
        "joint_solves": sol.joint_solves,
        "timed_out": sol.timed_out,
        "workers": sol.workers,
        "valid": inst.is_valid(&sol.removed),
    }))
}

fn format_for(path: &std::path::Path) -> ReportFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => ReportFormat::Csv,
        Some("md") => ReportFormat::Markdown,
        _ => ReportFormat::Json,
    }
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.workers {
        cfg.workers = Some(v);
    }
    if let Some(v) = a.algorithms {
        cfg.algorithms = v.iter().map(|s| s.parse()).collect::<pathcut::Result<_>>()?;
    }
    if let Some(v) = a.output {
        cfg.output = Some(v);
    }
    cfg.validate()?;
    let records = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => {
            let text = render_report(&records, format_for(path), a.with_timing)?;
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} trials to {}", records.len(), path.display());
        }
        None => print!("{}", render_report(&records, ReportFormat::Json, a.with_timing)?),
    }
    eprint!("{}", render_report(&records, ReportFormat::Markdown, a.with_timing)?);
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let records: Vec<TrialRecord> = serde_json::from_str(&text).context("parsing raw dump")?;
    let out = match a.format {
        ReportFormat::Json => format!("{}\n", serde_json::to_string_pretty(&summarize(&records))?),
        f => render_report(&records, f, a.with_timing)?,
    };
    match a.output {
        Some(path) => std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => cmd_generate(a),
        Command::AttackPath(a) => cmd_attack_path(a),
        Command::AttackEdge(a) => cmd_attack_target(a, false),
        Command::AttackNode(a) => cmd_attack_target(a, true),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Report(a) => cmd_report(a),
    }
}
