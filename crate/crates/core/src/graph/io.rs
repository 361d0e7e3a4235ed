//! Edge-list text formats.
//!
//! Whitespace format: one edge per line, `u v [weight [cost]]`, `#` starts a comment.
//! CSV format: header `u,v,weight,cost` (weight and cost columns optional).
//! Missing weights default to 1 and missing costs to the weight.
//!
//! Lines starting with `#!` are directives written by [`save_edge_list`] so that a
//! saved graph loads back identically: `#! directed <bool>` and `#! node <label>`
//! (one per node, in id order, which also preserves isolated nodes).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Graph, GraphBuilder};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeListFormat {
    #[default]
    Whitespace,
    Csv,
}

impl EdgeListFormat {
    /// Picks CSV for `.csv` files and the whitespace format otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => EdgeListFormat::Csv,
            _ => EdgeListFormat::Whitespace,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub format: EdgeListFormat,
    /// Used when the file has no `#! directed` directive.
    pub directed: bool,
    /// Drop repeated edges instead of failing (real datasets often list both directions).
    pub skip_duplicates: bool,
    pub skip_self_loops: bool,
    /// Replace every cost by 1 after loading.
    pub unit_costs: bool,
}

struct Header {
    directed: Option<bool>,
    nodes: Vec<String>,
}

fn parse_directive(path: &Path, line_no: usize, body: &str, header: &mut Header) -> Result<()> {
    let mut parts = body.split_whitespace();
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line_no,
        message,
    };
    match (parts.next(), parts.next()) {
        (Some("directed"), Some(v)) => {
            let value = v
                .parse::<bool>()
                .map_err(|_| parse_err(format!("bad directed flag `{v}`")))?;
            header.directed = Some(value);
        }
        (Some("node"), Some(label)) => header.nodes.push(label.to_string()),
        _ => {}
    }
    Ok(())
}

fn parse_number(path: &Path, line: usize, field: &str, what: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("cannot parse {what} `{field}`"),
    })
}

struct RawEdge {
    line: usize,
    u: String,
    v: String,
    weight: f64,
    cost: f64,
}

fn raw_edge(path: &Path, line: usize, fields: &[&str]) -> Result<RawEdge> {
    if fields.len() < 2 || fields.len() > 4 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("expected `u v [weight [cost]]`, found {} fields", fields.len()),
        });
    }
    let weight = match fields.get(2) {
        Some(f) if !f.trim().is_empty() => parse_number(path, line, f, "weight")?,
        _ => 1.0,
    };
    let cost = match fields.get(3) {
        Some(f) if !f.trim().is_empty() => parse_number(path, line, f, "cost")?,
        _ => weight,
    };
    Ok(RawEdge {
        line,
        u: fields[0].trim().to_string(),
        v: fields[1].trim().to_string(),
        weight,
        cost,
    })
}

pub fn load_edge_list(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut header = Header {
        directed: None,
        nodes: Vec::new(),
    };
    let mut body = String::with_capacity(text.len());
    for (i, line) in text.lines().enumerate() {
        if let Some(directive) = line.trim_start().strip_prefix("#!") {
            parse_directive(path, i + 1, directive, &mut header)?;
            // keep line numbering aligned for the CSV reader
            body.push('#');
        } else {
            body.push_str(line);
        }
        body.push('\n');
    }

    let mut raw = Vec::new();
    match opts.format {
        EdgeListFormat::Whitespace => {
            for (i, line) in body.lines().enumerate() {
                let content = line.split('#').next().unwrap_or("");
                let fields: Vec<&str> = content.split_whitespace().collect();
                if fields.is_empty() {
                    continue;
                }
                raw.push(raw_edge(path, i + 1, &fields)?);
            }
        }
        EdgeListFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .comment(Some(b'#'))
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(body.as_bytes());
            for record in reader.records() {
                let record = record.map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                    message: e.to_string(),
                })?;
                let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
                let fields: Vec<&str> = record.iter().collect();
                raw.push(raw_edge(path, line, &fields)?);
            }
        }
    }

    let directed = header.directed.unwrap_or(opts.directed);
    let mut builder = GraphBuilder::with_labels(directed, Vec::new());
    for label in &header.nodes {
        builder.node(label);
    }
    for edge in raw {
        let u = builder.node(&edge.u);
        let v = builder.node(&edge.v);
        if u == v && opts.skip_self_loops {
            continue;
        }
        if opts.skip_duplicates && builder.contains_edge(u, v) {
            continue;
        }
        let cost = if opts.unit_costs { 1.0 } else { edge.cost };
        builder.add_edge(u, v, edge.weight, cost).map_err(|e| match e {
            Error::DuplicateEdge(..) | Error::SelfLoop(_) | Error::NegativeValue { .. } => Error::Parse {
                path: path.to_path_buf(),
                line: edge.line,
                message: e.to_string(),
            },
            other => other,
        })?;
    }
    Ok(builder.build())
}

/// Writes `g` so that [`load_edge_list`] reproduces it exactly.
pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>, format: EdgeListFormat) -> Result<()> {
    let path = path.as_ref();
    for label in g.labels() {
        if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == ',' || c == '#' || c == '"') {
            return Err(Error::InvalidParameter(format!(
                "node label `{label}` cannot be written to an edge list"
            )));
        }
    }
    let mut out = String::new();
    writeln!(out, "#! directed {}", g.is_directed()).unwrap();
    for label in g.labels() {
        writeln!(out, "#! node {label}").unwrap();
    }
    let sep = match format {
        EdgeListFormat::Whitespace => " ",
        EdgeListFormat::Csv => {
            out.push_str("u,v,weight,cost\n");
            ","
        }
    };
    for e in g.edges() {
        // f64 Display is the shortest representation that round-trips
        writeln!(
            out,
            "{}{sep}{}{sep}{}{sep}{}",
            g.label(e.source),
            g.label(e.target),
            e.weight,
            e.cost
        )
        .unwrap();
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
