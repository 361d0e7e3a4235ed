//! Depth-first branch-and-bound for programs whose integer variables are binary.

use std::time::Instant;

use crate::error::Result;

use super::{solve, LinearProgram, LpStatus};

const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum BinaryOutcome {
    Optimal { values: Vec<f64>, objective: f64 },
    Infeasible,
    /// The deadline passed; carries the best integral point seen, if any.
    TimedOut { incumbent: Option<(Vec<f64>, f64)> },
}

/// Minimizes `lp` with the listed variables restricted to {0, 1}.
///
/// Branches on the most fractional variable and explores the child nearest the
/// relaxed value first. Returned binary entries are rounded exactly to 0 or 1.
pub fn solve_binary(lp: &LinearProgram, binary: &[usize], deadline: Option<Instant>) -> Result<BinaryOutcome> {
    let mut root = lp.clone();
    for &j in binary {
        root.lower[j] = root.lower[j].max(0.0).ceil();
        root.upper[j] = root.upper[j].min(1.0).floor();
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut stack = vec![(root.lower.clone(), root.upper.clone())];
    let mut node = root;
    while let Some((lower, upper)) = stack.pop() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(BinaryOutcome::TimedOut { incumbent: best });
        }
        node.lower = lower;
        node.upper = upper;
        let sol = solve(&node)?;
        match sol.status {
            LpStatus::Infeasible => continue,
            // a bounded binary program cannot be unbounded unless its continuous part is
            LpStatus::Unbounded => continue,
            LpStatus::Optimal => {}
        }
        let bound = sol.objective_value;
        if let Some((_, incumbent)) = &best {
            if bound >= incumbent - 1e-9 * (1.0 + incumbent.abs()) {
                continue;
            }
        }
        let branch = binary
            .iter()
            .map(|&j| (j, (sol.values[j] - sol.values[j].round()).abs()))
            .filter(|&(_, frac)| frac > INTEGRALITY_TOL)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match branch {
            None => {
                let mut values = sol.values;
                for &j in binary {
                    values[j] = values[j].round();
                }
                let objective = values.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
                best = Some((values, objective));
            }
            Some((j, _)) => {
                let up_first = sol.values[j] >= 0.5;
                let mut down = (node.lower.clone(), node.upper.clone());
                down.1[j] = 0.0;
                let mut up = (node.lower.clone(), node.upper.clone());
                up.0[j] = 1.0;
                if up_first {
                    stack.push(down);
                    stack.push(up);
                } else {
                    stack.push(up);
                    stack.push(down);
                }
            }
        }
    }
    Ok(match best {
        Some((values, objective)) => BinaryOutcome::Optimal { values, objective },
        None => BinaryOutcome::Infeasible,
    })
}
