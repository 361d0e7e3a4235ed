//! Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Every criterion also produces a raw dump (no wall-clock fields). The whole suite
//! runs twice and the determinism criterion compares the two sets of dumps byte for
//! byte. Dumps are written under the cargo test scratch directory for inspection.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pathcut::attack::{is_strictly_shortest, is_strictly_shortest_without_nodes, pathattack, AttackOptions, NodeAttackInstance};
use pathcut::baselines::{greedy_cost_baseline, greedy_eigenscore_baseline};
use pathcut::cover::{exact_path_cover, harmonic, rand_path_cover, rounding_bound_factor, CoverEngine, PathConstraintSet};
use pathcut::experiment::{run_experiment, select_target_element, select_terminals, Algorithm, ExperimentConfig, ProblemKind, TerminalRule};
use pathcut::fixtures::{bottleneck, build_line_graph_fixture, build_three_terminal_fixture, clique};
use pathcut::graph::{assign_weights, generate, EdgeSet, Graph, Model, WeightKind, WeightScheme};
use pathcut::oracles::{brute_force_node_removal, brute_force_path_cut, brute_force_target_cut, min_cut_value};
use pathcut::paths::{bfs_depths, k_shortest_simple_paths, Restriction};
use pathcut::target::{combinatorial_search, heuristic_search, is_valid_target_cut, node_cut_search, SearchMode, Target, TargetCutInstance};
use serde_json::{json, Value};

/// Cut-validity tally shared by every criterion.
#[derive(Default)]
struct Validity {
    checked: BTreeMap<&'static str, usize>,
    invalid: Vec<String>,
}

impl Validity {
    fn record(&mut self, algorithm: &'static str, ok: bool, context: impl FnOnce() -> String) {
        *self.checked.entry(algorithm).or_default() += 1;
        if !ok {
            self.invalid.push(format!("{algorithm}: {}", context()));
        }
    }
}

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
    dump: Value,
    elapsed: Duration,
    limit: Duration,
}

fn finish(id: usize, limit_secs: u64, start: Instant, pass: bool, detail: String, dump: Value) -> Outcome {
    Outcome {
        id,
        pass,
        detail,
        dump,
        elapsed: start.elapsed(),
        limit: Duration::from_secs(limit_secs),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

const SCHEMES: [WeightKind; 3] = [
    WeightKind::Equal,
    WeightKind::Poisson { rate: 20.0 },
    WeightKind::Uniform { lo: 1, hi: 41 },
];

fn small_model(i: u64) -> Model {
    match i % 4 {
        0 => Model::Er { n: 10, p: 0.3 },
        1 => Model::Ba { n: 10, m: 2 },
        2 => Model::Ws { n: 10, k: 4, beta: 0.3 },
        _ => Model::Lat { rows: 3, cols: 4 },
    }
}

fn path_approximation(v: &mut Validity) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    let (mut violations, mut rand_exact) = (0, 0);
    let mut seed = 0u64;
    while rows.len() < 240 && seed < 5000 {
        seed += 1;
        let Ok(g) = generate(&small_model(seed), seed) else { continue };
        let scheme = WeightScheme::new(SCHEMES[(seed / 4 % 3) as usize], seed);
        let Ok(g) = assign_weights(&g, &scheme) else { continue };
        let (s, t) = (0, g.node_count() - 1);
        let rank = 2 + (seed % 4) as usize;
        let Some(p_star) = k_shortest_simple_paths(&g, s, t, rank).into_iter().nth(rank - 1) else { continue };
        let keep = EdgeSet::new();
        let Ok(exact) = brute_force_path_cut(&g, &p_star, &keep, 14) else { continue };
        let opt = exact.cost;
        let greedy = pathattack(&g, &p_star, &keep, &AttackOptions::new(CoverEngine::Greedy, seed)).unwrap();
        let rand = pathattack(&g, &p_star, &keep, &AttackOptions::new(CoverEngine::Rand, seed)).unwrap();
        for (name, r) in [("pathattack_greedy", &greedy), ("pathattack_rand", &rand)] {
            let cut: EdgeSet = r.cut.cut.iter().copied().collect();
            v.record(name, is_strictly_shortest(&g, &p_star, &cut), || format!("path seed {seed}"));
        }
        for (name, r) in [
            ("greedy_cost", greedy_cost_baseline(&g, &p_star, &keep)),
            ("greedy_eigenscore", greedy_eigenscore_baseline(&g, &p_star, &keep)),
        ] {
            let r = r.unwrap();
            v.record(name, is_strictly_shortest(&g, &p_star, &r.removed), || format!("path seed {seed}"));
        }
        let gp = greedy.generated_paths.len().max(1);
        let rp = rand.generated_paths.len().max(1);
        let greedy_ok = greedy.cut.total_cost <= harmonic(gp) * opt * (1.0 + 1e-9) + 1e-9;
        let rand_ok = rand.cut.total_cost <= rounding_bound_factor(rp) * opt * (1.0 + 1e-9) + 1e-9;
        violations += usize::from(!greedy_ok) + usize::from(!rand_ok);
        rand_exact += usize::from(close(rand.cut.total_cost, opt));
        rows.push(json!({
            "seed": seed, "edges": g.edge_count(), "opt": opt,
            "greedy": greedy.cut.total_cost, "greedy_paths": gp,
            "rand": rand.cut.total_cost, "rand_paths": rp, "rand_trials": rand.cut.trials,
        }));
    }
    let n = rows.len();
    let frac = rand_exact as f64 / n.max(1) as f64;
    let pass = n >= 200 && violations == 0 && frac >= 0.75;
    let detail = format!("{n} instances, {violations} bound violations, rand exact in {:.1}%", 100.0 * frac);
    finish(1, 300, start, pass, detail, Value::Array(rows))
}

fn clique_closed_form(v: &mut Validity) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut pass = true;
    for n in [6usize, 8, 10] {
        let c = clique(n).unwrap();
        let (s, t) = (c.p_star.source(), c.p_star.target());
        let flow = min_cut_value(&c.graph, s, t, &c.p_star.edge_set());
        let bound = (n - 2) * (n - 2) + (n - 2);
        for engine in [CoverEngine::Greedy, CoverEngine::Rand] {
            let r = pathattack(&c.graph, &c.p_star, &EdgeSet::new(), &AttackOptions::new(engine, n as u64)).unwrap();
            let cut: EdgeSet = r.cut.cut.iter().copied().collect();
            v.record(if engine == CoverEngine::Rand { "pathattack_rand" } else { "pathattack_greedy" }, r.final_check, || {
                format!("clique {n}")
            });
            let ok = r.cut.total_cost == (n - 2) as f64
                && flow == (n - 2) as f64
                && r.generated_paths.len() <= bound
                && is_strictly_shortest(&c.graph, &c.p_star, &cut);
            pass &= ok;
            rows.push(json!({
                "n": n, "engine": engine.name(), "cost": r.cut.total_cost, "max_flow": flow,
                "constraints": r.generated_paths.len(), "bound": bound,
            }));
        }
    }
    let detail = rows
        .iter()
        .map(|r| format!("N={} {} cost {} flow {} constraints {}/{}", r["n"], r["engine"].as_str().unwrap_or_default(), r["cost"], r["max_flow"], r["constraints"], r["bound"]))
        .collect::<Vec<_>>()
        .join("; ");
    finish(3, 10, start, pass, detail, Value::Array(rows))
}

fn bottleneck_gap(v: &mut Validity) -> Outcome {
    let start = Instant::now();
    let f = bottleneck(5, 1.0, 10.0);
    let path = pathattack(&f.graph, &f.p_star, &EdgeSet::new(), &AttackOptions::new(CoverEngine::Rand, 0)).unwrap();
    let inst = TargetCutInstance::new(f.graph.clone(), f.s, f.t, Target::Edge(f.target)).unwrap();
    let heur = heuristic_search(&inst).unwrap();
    let comb = combinatorial_search(&inst).unwrap();
    let path_cut: EdgeSet = path.cut.cut.iter().copied().collect();
    v.record("pathattack_rand", inst.is_valid(&path_cut), || "bottleneck".into());
    v.record("heuristic", inst.is_valid(&heur.removed), || "bottleneck".into());
    v.record("combinatorial", inst.is_valid(&comb.removed), || "bottleneck".into());
    let pass = path.cut.total_cost == 50.0 && heur.cost == 1.0 && comb.cost == 1.0;
    let detail = format!("path-targeted {}, heuristic {}, combinatorial {}", path.cut.total_cost, heur.cost, comb.cost);
    let dump = json!({"path_targeted": path.cut.total_cost, "heuristic": heur.cost, "combinatorial": comb.cost});
    finish(4, 5, start, pass, detail, dump)
}

fn rounding_trials() -> Outcome {
    let start = Instant::now();
    // 12 edges; the six paths after the shortest form the rows, whose relaxation is fractional
    let g = generate(&Model::Er { n: 8, p: 0.45 }, 21).unwrap();
    let g = assign_weights(&g, &WeightScheme::new(WeightKind::Uniform { lo: 1, hi: 5 }, 21)).unwrap();
    let paths = k_shortest_simple_paths(&g, 0, 7, 7);
    let keep: BTreeSet<usize> = paths[0].edges.iter().copied().collect();
    let mut pcs = PathConstraintSet::new(g.costs(), keep);
    for p in paths[1..].iter().cloned() {
        pcs.add_path(p).unwrap();
    }
    let opt = exact_path_cover(&pcs, None).unwrap().total_cost;
    let runs = 10_000u64;
    let mut total = 0usize;
    let mut lp = f64::NAN;
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for seed in 0..runs {
        let r = rand_path_cover(&pcs, seed).unwrap();
        assert!(pcs.is_covered_by(&r.cut));
        lp = r.lp_objective.unwrap();
        total += r.trials;
        *histogram.entry(r.trials).or_default() += 1;
    }
    let mean = total as f64 / runs as f64;
    let pass = g.edge_count() == 12 && pcs.len() == 6 && lp < opt - 1e-9 && mean < 2.2;
    let detail = format!(
        "{} edges, {} paths, relaxation {lp} vs optimum {opt}, mean trials {mean:.4} over {runs} runs",
        g.edge_count(),
        pcs.len()
    );
    finish(5, 30, start, pass, detail, json!({"lp": lp, "opt": opt, "mean_trials": mean, "histogram": histogram}))
}

fn target_instance(seed: u64, kind: ProblemKind) -> Option<(Graph, usize, usize, Target)> {
    let n = 7 + (seed % 4) as usize;
    let model = match seed % 3 {
        0 => Model::Er { n, p: 0.35 },
        1 => Model::Ba { n, m: 2 },
        _ => Model::Ws { n, k: 4, beta: 0.3 },
    };
    let g = generate(&model, seed).ok()?;
    let g = assign_weights(&g, &WeightScheme::new(WeightKind::Uniform { lo: 1, hi: 10 }, seed)).ok()?;
    if g.edge_count() > 16 {
        return None;
    }
    let (s, t) = select_terminals(&g, TerminalRule::Uniform, seed).ok()?;
    let target = select_target_element(&g, s, t, kind, 1 + (seed % 3) as usize).ok()?;
    Some((g, s, t, target))
}

fn target_optimality(v: &mut Validity) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut pass = true;
    let mut summary = Vec::new();
    for kind in [ProblemKind::Edge, ProblemKind::Node] {
        let (mut feasible, mut equal, mut compared, mut mismatches) = (0, 0, 0, 0);
        let mut seed = 0u64;
        while compared < 110 && seed < 5000 {
            seed += 1;
            let Some((g, s, t, target)) = target_instance(seed, kind) else { continue };
            let inst = TargetCutInstance::new(g.clone(), s, t, target).unwrap();
            let exact = brute_force_target_cut(&g, s, t, target, 16);
            let (comb, heur) = match kind {
                ProblemKind::Node => (node_cut_search(&inst, SearchMode::Combinatorial), node_cut_search(&inst, SearchMode::Heuristic)),
                _ => (combinatorial_search(&inst), heuristic_search(&inst)),
            };
            compared += 1;
            let Ok(exact) = exact else {
                // infeasible instances must be reported as such by both searches
                mismatches += usize::from(comb.is_ok() || heur.is_ok());
                rows.push(json!({"kind": kind, "seed": seed, "feasible": false}));
                continue;
            };
            feasible += 1;
            let (comb, heur) = (comb.unwrap(), heur.unwrap());
            v.record("combinatorial", is_valid_target_cut(&g, s, t, target, &comb.removed), || format!("{kind:?} seed {seed}"));
            v.record("heuristic", is_valid_target_cut(&g, s, t, target, &heur.removed), || format!("{kind:?} seed {seed}"));
            mismatches += usize::from((comb.cost - exact.cost).abs() > inst.eps);
            mismatches += usize::from(heur.cost < comb.cost - inst.eps);
            equal += usize::from((heur.cost - comb.cost).abs() <= inst.eps);
            rows.push(json!({
                "kind": kind, "seed": seed, "feasible": true, "opt": exact.cost,
                "combinatorial": comb.cost, "heuristic": heur.cost,
            }));
        }
        let frac = equal as f64 / feasible.max(1) as f64;
        pass &= compared >= 100 && mismatches == 0 && frac >= 0.6;
        summary.push(format!("{kind:?}: {compared} instances ({feasible} feasible), {mismatches} mismatches, heuristic equal {:.1}%", 100.0 * frac));
    }
    finish(6, 600, start, pass, summary.join("; "), Value::Array(rows))
}

fn separated(g: &Graph, cut: &EdgeSet, terminals: &[usize]) -> bool {
    let r = Restriction::without_edges(g, cut);
    terminals.iter().all(|&a| {
        let depth = bfs_depths(g, a, &r);
        terminals.iter().all(|&b| a == b || depth[b].is_none())
    })
}

fn reduction_soundness(v: &mut Validity) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    let (mut three, mut three_ok, mut line, mut line_ok) = (0, 0, 0, 0);
    let mut seed = 0u64;
    while (three < 50 || line < 50) && seed < 2000 {
        seed += 1;
        let n = 5 + (seed % 4) as usize;
        let Ok(g) = generate(&Model::Er { n, p: 0.45 }, seed) else { continue };
        if three < 50 && g.edge_count() > 0 {
            let f = build_three_terminal_fixture(&g, 0, 1, 2).unwrap();
            let p = f.p_star.clone().unwrap();
            let r = pathattack(&f.reduced, &p, &EdgeSet::new(), &AttackOptions::new(CoverEngine::Rand, seed)).unwrap();
            v.record("pathattack_rand", r.final_check, || format!("three-terminal seed {seed}"));
            let mapped = f.map_back(&r.cut.cut);
            let ok = separated(&g, &mapped, &f.terminals);
            three += 1;
            three_ok += usize::from(ok);
            rows.push(json!({"fixture": "three_terminal", "seed": seed, "cut": r.cut.total_cost, "mapped": mapped.len(), "separated": ok}));
        }
        if line < 50 && n <= 8 {
            let g = assign_weights(&g, &WeightScheme::new(WeightKind::Equal, seed)).unwrap();
            let g = g.with_costs(&(0..g.edge_count()).map(|e| 1.0 + (e * 7 % 5) as f64).collect::<Vec<_>>()).unwrap();
            let Some(p_star) = k_shortest_simple_paths(&g, 0, n - 1, 2).pop() else { continue };
            let Ok(edge_opt) = brute_force_path_cut(&g, &p_star, &EdgeSet::new(), 16) else { continue };
            let f = build_line_graph_fixture(&g, &p_star).unwrap();
            let p_hat = f.p_star.clone().unwrap();
            let mut node_cost: Vec<f64> = g.costs();
            node_cost.extend([1.0, 1.0]);
            let inst = NodeAttackInstance::new(f.reduced.clone(), p_hat.clone()).with_costs(node_cost).unwrap();
            let node_opt = brute_force_node_removal(&inst, 20);
            let ok = match &node_opt {
                Ok(c) => {
                    let removed: BTreeSet<usize> = c.removed.clone();
                    close(c.cost, edge_opt.cost) && is_strictly_shortest_without_nodes(&f.reduced, &p_hat, &removed)
                }
                Err(_) => false,
            };
            line += 1;
            line_ok += usize::from(ok);
            rows.push(json!({
                "fixture": "line_graph", "seed": seed, "edge_opt": edge_opt.cost,
                "node_opt": node_opt.map(|c| c.cost).ok(),
            }));
        }
    }
    let pass = three >= 50 && line >= 50 && three_ok == three && line_ok == line;
    let detail = format!("three-terminal {three_ok}/{three} separated; line graph {line_ok}/{line} optima equal");
    finish(7, 120, start, pass, detail, Value::Array(rows))
}

fn scaled_trend(v: &mut Validity) -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::from_toml_str(
        r#"
        name = "er200"
        trials = 20
        seed = 2024
        p_star_rank = 20
        weights = { kind = "uniform", lo = 1, hi = 41 }
        algorithms = ["greedy_cost", "greedy_eigenscore", "pathattack_greedy", "pathattack_rand"]
        [graph]
        model = "er"
        n = 200
        p = 0.05
        "#,
    )
    .unwrap();
    let records = run_experiment(&cfg).unwrap();
    let mut ratios: BTreeMap<Algorithm, Vec<f64>> = BTreeMap::new();
    for rec in &records {
        for r in &rec.results {
            if r.cost.is_some() {
                let name = r.algorithm.name();
                v.record(
                    match r.algorithm {
                        Algorithm::GreedyCost => "greedy_cost",
                        Algorithm::GreedyEigenscore => "greedy_eigenscore",
                        Algorithm::PathattackGreedy => "pathattack_greedy",
                        _ => "pathattack_rand",
                    },
                    r.valid,
                    || format!("{name} trial {}", rec.trial),
                );
            }
            if let Some(x) = r.cost_ratio {
                ratios.entry(r.algorithm).or_default().push(x);
            }
        }
    }
    let mean = |a: Algorithm| ratios.get(&a).map(|v| v.iter().sum::<f64>() / v.len() as f64);
    let (greedy, rand) = (mean(Algorithm::PathattackGreedy), mean(Algorithm::PathattackRand));
    let counted = ratios.get(&Algorithm::PathattackRand).map_or(0, Vec::len);
    let pass = counted == 20 && greedy.is_some_and(|g| g <= 1.0) && rand.is_some_and(|r| r <= 1.0);
    let detail = format!(
        "{counted} trials, mean ratio greedy {:.4}, rand {:.4}",
        greedy.unwrap_or(f64::NAN),
        rand.unwrap_or(f64::NAN)
    );
    let dump = serde_json::to_value(records.iter().map(|r| r.without_timing()).collect::<Vec<_>>()).unwrap();
    finish(8, 300, start, pass, detail, dump)
}

fn suite() -> Vec<Outcome> {
    let mut v = Validity::default();
    let mut out = vec![path_approximation(&mut v)];
    let c3 = clique_closed_form(&mut v);
    let c4 = bottleneck_gap(&mut v);
    let c5 = rounding_trials();
    let c6 = target_optimality(&mut v);
    let c7 = reduction_soundness(&mut v);
    let c8 = scaled_trend(&mut v);
    let start = Instant::now();
    let required = ["greedy_cost", "greedy_eigenscore", "pathattack_greedy", "pathattack_rand", "combinatorial", "heuristic"];
    let missing: Vec<_> = required.iter().filter(|a| !v.checked.contains_key(*a)).collect();
    let total: usize = v.checked.values().sum();
    let pass = v.invalid.is_empty() && missing.is_empty();
    let mut detail = format!("{total} cuts checked, {} invalid", v.invalid.len());
    if let Some(first) = v.invalid.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    if !missing.is_empty() {
        detail.push_str(&format!(", never exercised: {missing:?}"));
    }
    let dump = json!({"checked": v.checked, "invalid": v.invalid});
    out.push(finish(2, 1, start, pass, detail, dump));
    out.extend([c3, c4, c5, c6, c7, c8]);
    out.sort_by_key(|o| o.id);
    out
}

fn main() -> ExitCode {
    let first = suite();
    let second = suite();
    let dumps = |s: &[Outcome]| s.iter().map(|o| serde_json::to_string_pretty(&o.dump).unwrap()).collect::<Vec<_>>();
    let (a, b) = (dumps(&first), dumps(&second));
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let _ = std::fs::create_dir_all(&dir);
    for (o, text) in first.iter().zip(&a) {
        let _ = std::fs::write(dir.join(format!("criterion-{}.json", o.id)), text);
    }
    let differing: Vec<usize> = first.iter().zip(a.iter().zip(&b)).filter(|(_, (x, y))| x != y).map(|(o, _)| o.id).collect();
    let bytes: usize = a.iter().map(String::len).sum();

    let mut all = true;
    for o in &first {
        let in_time = o.elapsed <= o.limit;
        let pass = o.pass && in_time;
        all &= pass;
        println!(
            "criterion {}: {} ({:.2}s of {}s) {}{}",
            o.id,
            if pass { "PASS" } else { "FAIL" },
            o.elapsed.as_secs_f64(),
            o.limit.as_secs(),
            o.detail,
            if in_time { "" } else { " [over time limit]" }
        );
    }
    let deterministic = differing.is_empty();
    all &= deterministic;
    println!(
        "criterion 9: {} two full runs, {} dumps, {bytes} bytes, differing: {differing:?}",
        if deterministic { "PASS" } else { "FAIL" },
        a.len()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
