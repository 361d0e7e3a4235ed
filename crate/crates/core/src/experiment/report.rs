//! Rendering trial records as CSV, JSON, or a markdown summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Algorithm, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::InvalidParameter(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    /// Runs that returned a cut.
    pub completed: usize,
    pub failed: usize,
    pub invalid: usize,
    pub mean_cost: Option<f64>,
    pub mean_ratio: Option<f64>,
    /// Standard error of the mean ratio.
    pub ratio_stderr: Option<f64>,
    pub optimal_fraction: Option<f64>,
    pub mean_wall_time_secs: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample standard deviation over `sqrt(n)`; zero for a single value.
fn stderr(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    let n = values.len();
    if n < 2 {
        return Some(0.0);
    }
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some((var / n as f64).sqrt())
}

pub fn summarize(records: &[TrialRecord]) -> Vec<AlgorithmSummary> {
    let mut by_alg: BTreeMap<Algorithm, Vec<&super::AlgorithmResult>> = BTreeMap::new();
    for rec in records {
        for r in &rec.results {
            by_alg.entry(r.algorithm).or_default().push(r);
        }
    }
    by_alg
        .into_iter()
        .map(|(algorithm, runs)| {
            let costs: Vec<f64> = runs.iter().filter_map(|r| r.cost).collect();
            let ratios: Vec<f64> = runs.iter().filter_map(|r| r.cost_ratio).collect();
            let optimal: Vec<bool> = runs.iter().filter_map(|r| r.optimal).collect();
            let times: Vec<f64> = runs.iter().filter_map(|r| r.wall_time_secs).collect();
            AlgorithmSummary {
                algorithm,
                completed: costs.len(),
                failed: runs.len() - costs.len(),
                invalid: runs.iter().filter(|r| r.cost.is_some() && !r.valid).count(),
                mean_cost: mean(&costs),
                mean_ratio: mean(&ratios),
                ratio_stderr: stderr(&ratios),
                optimal_fraction: (!optimal.is_empty())
                    .then(|| optimal.iter().filter(|&&o| o).count() as f64 / optimal.len() as f64),
                mean_wall_time_secs: mean(&times),
            }
        })
        .collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn render_csv(records: &[TrialRecord], with_timing: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "trial", "graph_id", "seed", "nodes", "edges", "s", "t", "target", "p_star_length", "p_star_hops", "oracle_cost", "trial_status",
        "algorithm", "status", "cost", "cost_ratio", "valid", "optimal", "iterations", "timed_out", "removed",
    ];
    if with_timing {
        header.push("wall_time_secs");
    }
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for rec in records {
        let target = rec.target.map(|t| serde_json::to_string(&t).unwrap_or_default()).unwrap_or_default();
        let status = |o: &super::Outcome| match o {
            super::Outcome::Ok => "ok".to_string(),
            super::Outcome::Failed { kind, .. } => kind.clone(),
        };
        let base = vec![
            rec.trial.to_string(),
            rec.graph_id.clone(),
            rec.seed.to_string(),
            rec.nodes.to_string(),
            rec.edges.to_string(),
            opt(rec.s),
            opt(rec.t),
            target,
            opt(rec.p_star_length),
            opt(rec.p_star_hops),
            opt(rec.oracle_cost),
            status(&rec.outcome),
        ];
        if rec.results.is_empty() {
            let mut row = base.clone();
            row.extend(std::iter::repeat_n(String::new(), header.len() - row.len()));
            w.write_record(&row).map_err(csv_err)?;
        }
        for r in &rec.results {
            let mut row = base.clone();
            row.extend([
                r.algorithm.name().to_string(),
                status(&r.outcome),
                opt(r.cost),
                opt(r.cost_ratio),
                r.valid.to_string(),
                opt(r.optimal),
                r.iterations.to_string(),
                r.timed_out.to_string(),
                r.removed.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "),
            ]);
            if with_timing {
                row.push(opt(r.wall_time_secs));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

fn fmt_num(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into())
}

fn render_markdown(records: &[TrialRecord], with_timing: bool) -> String {
    let failed = records.iter().filter(|r| !r.outcome.is_ok()).count();
    let mut out = String::new();
    let _ = writeln!(out, "# Experiment summary\n");
    let _ = writeln!(out, "{} trials, {} failed before any algorithm ran.\n", records.len(), failed);
    let mut header = "| algorithm | completed | failed | invalid | mean cost | mean ratio | ratio s.e. | optimal |".to_string();
    let mut rule = "|---|---|---|---|---|---|---|---|".to_string();
    if with_timing {
        header.push_str(" mean time (s) |");
        rule.push_str("---|");
    }
    let _ = writeln!(out, "{header}\n{rule}");
    for s in summarize(records) {
        let _ = write!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            s.algorithm.name(),
            s.completed,
            s.failed,
            s.invalid,
            fmt_num(s.mean_cost),
            fmt_num(s.mean_ratio),
            fmt_num(s.ratio_stderr),
            fmt_num(s.optimal_fraction),
        );
        if with_timing {
            let _ = write!(out, " {} |", fmt_num(s.mean_wall_time_secs));
        }
        out.push('\n');
    }
    out
}

/// Renders `records`. Without `with_timing` the output is a deterministic function
/// of the configuration and seeds.
pub fn render_report(records: &[TrialRecord], format: ReportFormat, with_timing: bool) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to report".into()));
    }
    let stripped: Vec<TrialRecord>;
    let records = if with_timing {
        records
    } else {
        stripped = records.iter().map(TrialRecord::without_timing).collect();
        &stripped
    };
    match format {
        ReportFormat::Csv => render_csv(records, with_timing),
        ReportFormat::Json => serde_json::to_string_pretty(records)
            .map(|s| s + "\n")
            .map_err(|e| Error::Config(e.to_string())),
        ReportFormat::Markdown => Ok(render_markdown(records, with_timing)),
    }
}

pub fn write_report(records: &[TrialRecord], format: ReportFormat, path: impl AsRef<FsPath>, with_timing: bool) -> Result<()> {
    let path = path.as_ref();
    let text = render_report(records, format, with_timing)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
