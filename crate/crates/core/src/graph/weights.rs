use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// Every weight is 1.
    Equal,
    /// `1 + Poisson(rate)`.
    Poisson { rate: f64 },
    /// Integers drawn uniformly from `lo..=hi`.
    Uniform { lo: i64, hi: i64 },
}

impl WeightKind {
    /// Parses `equal`, `poisson:RATE`, or `uniform:LO:HI`.
    pub fn parse(text: &str) -> Result<WeightKind> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number `{s}` in `{text}`")))
        };
        let int = |s: &str| -> Result<i64> {
            s.parse::<i64>()
                .map_err(|_| Error::InvalidParameter(format!("bad integer `{s}` in `{text}`")))
        };
        match parts.as_slice() {
            ["equal"] => Ok(WeightKind::Equal),
            ["poisson"] => Ok(WeightKind::Poisson { rate: 20.0 }),
            ["poisson", r] => Ok(WeightKind::Poisson { rate: num(r)? }),
            ["uniform"] => Ok(WeightKind::Uniform { lo: 1, hi: 41 }),
            ["uniform", lo, hi] => Ok(WeightKind::Uniform {
                lo: int(lo)?,
                hi: int(hi)?,
            }),
            _ => Err(Error::InvalidParameter(format!("unknown weight scheme `{text}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightKind::Equal => "equal",
            WeightKind::Poisson { .. } => "poisson",
            WeightKind::Uniform { .. } => "uniform",
        }
    }
}

/// How removal costs are derived after weights are drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostRule {
    /// Cost equals the new weight.
    #[default]
    Weight,
    /// Every cost is 1.
    Unit,
    /// Costs already on the graph are left alone.
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub kind: WeightKind,
    pub seed: u64,
    #[serde(default)]
    pub costs: CostRule,
}

impl WeightScheme {
    pub fn new(kind: WeightKind, seed: u64) -> Self {
        WeightScheme {
            kind,
            seed,
            costs: CostRule::Weight,
        }
    }
}

/// Draws fresh weights (and costs, per `scheme.costs`) in edge-id order.
pub fn assign_weights(g: &Graph, scheme: &WeightScheme) -> Result<Graph> {
    let m = g.edge_count();
    let mut rng = ChaCha8Rng::seed_from_u64(scheme.seed);
    let weights: Vec<f64> = match scheme.kind {
        WeightKind::Equal => vec![1.0; m],
        WeightKind::Poisson { rate } => {
            let dist = Poisson::new(rate)
                .map_err(|e| Error::InvalidParameter(format!("poisson rate {rate}: {e}")))?;
            (0..m).map(|_| 1.0 + dist.sample(&mut rng)).collect()
        }
        WeightKind::Uniform { lo, hi } => {
            if lo > hi || lo < 0 {
                return Err(Error::InvalidParameter(format!(
                    "uniform range {lo}..={hi} is empty or negative"
                )));
            }
            (0..m).map(|_| rng.gen_range(lo..=hi) as f64).collect()
        }
    };
    let reweighted = g.with_weights(&weights)?;
    match scheme.costs {
        CostRule::Weight => reweighted.with_costs(&weights),
        CostRule::Unit => reweighted.with_costs(&vec![1.0; m]),
        CostRule::Keep => Ok(reweighted),
    }
}
