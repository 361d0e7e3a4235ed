//! Dense bounded-variable primal simplex, two phases.
//!
//! Variables are shifted to `0 <= y <= hi - lo`; nonbasic variables sit at either
//! bound, so box constraints never become rows. Phase one minimizes the sum of
//! artificial variables, which are then pinned to zero for phase two.

use crate::error::{Error, Result};

use super::{LinearProgram, LpSolution, LpStatus, Sense, FEASIBILITY_TOL};

const PIVOT_TOL: f64 = 1e-9;
const OPTIMALITY_TOL: f64 = 1e-9;
const DEGENERATE_STREAK_FOR_BLAND: usize = 50;

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    /// Current value of the basic variable in each row.
    beta: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    reduced: Vec<f64>,
    /// Columns that may enter the basis.
    eligible: Vec<bool>,
}

enum Step {
    Optimal,
    Unbounded,
    Continue,
}

impl Tableau {
    fn set_costs(&mut self, cost: &[f64]) {
        self.reduced = cost.to_vec();
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.cols..(i + 1) * self.cols];
                for (d, &v) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * v;
                }
            }
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            if self.in_basis[j] || !self.eligible[j] || self.upper[j] <= 0.0 {
                continue;
            }
            let d = self.reduced[j];
            let dir = if self.at_upper[j] {
                if d > OPTIMALITY_TOL {
                    -1.0
                } else {
                    continue;
                }
            } else if d < -OPTIMALITY_TOL {
                1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(b, _)| d.abs() > self.reduced[b].abs()) {
                best = Some((j, dir));
            }
        }
        best
    }

    fn step(&mut self, bland: bool, degenerate: &mut usize) -> Step {
        let Some((q, dir)) = self.choose_entering(bland) else {
            return Step::Optimal;
        };
        let mut theta = self.upper[q];
        let mut leave: Option<(usize, bool)> = None;
        for i in 0..self.rows {
            let alpha = dir * self.a[i * self.cols + q];
            let b = self.basis[i];
            let limit = if alpha > PIVOT_TOL {
                Some((self.beta[i].max(0.0) / alpha, false))
            } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                Some(((self.upper[b] - self.beta[i]).max(0.0) / -alpha, true))
            } else {
                None
            };
            if let Some((lim, to_upper)) = limit {
                let better = lim < theta - 1e-12
                    || (lim <= theta + 1e-12
                        && leave.map_or(theta.is_infinite(), |(r, _)| {
                            if bland {
                                b < self.basis[r]
                            } else {
                                alpha.abs() > (self.a[r * self.cols + q]).abs()
                            }
                        }));
                if better {
                    theta = lim;
                    leave = Some((i, to_upper));
                }
            }
        }
        if theta.is_infinite() {
            return Step::Unbounded;
        }
        if theta < 1e-12 {
            *degenerate += 1;
        } else {
            *degenerate = 0;
        }
        for i in 0..self.rows {
            let alpha = self.a[i * self.cols + q];
            if alpha != 0.0 {
                self.beta[i] -= dir * alpha * theta;
            }
        }
        let entering_value = if self.at_upper[q] { self.upper[q] } else { 0.0 } + dir * theta;
        match leave {
            None => {
                // bound flip
                self.at_upper[q] = !self.at_upper[q];
            }
            Some((r, to_upper)) => {
                let old = self.basis[r];
                self.in_basis[old] = false;
                self.at_upper[old] = to_upper;
                self.in_basis[q] = true;
                self.at_upper[q] = false;
                self.basis[r] = q;
                self.beta[r] = entering_value;
                self.pivot(r, q);
            }
        }
        Step::Continue
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let piv = self.a[r * cols + q];
        {
            let row = &mut self.a[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.a.split_at_mut(r * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        for chunk in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = chunk[q];
            if f != 0.0 {
                for (v, &p) in chunk.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * p;
                }
                chunk[q] = 0.0;
            }
        }
        let f = self.reduced[q];
        if f != 0.0 {
            for (d, &p) in self.reduced.iter_mut().zip(pivot_row.iter()) {
                *d -= f * p;
            }
            self.reduced[q] = 0.0;
        }
    }

    fn run(&mut self, max_iter: usize) -> Result<Step> {
        let mut degenerate = 0;
        for _ in 0..max_iter {
            let bland = degenerate >= DEGENERATE_STREAK_FOR_BLAND;
            match self.step(bland, &mut degenerate) {
                Step::Continue => {}
                done => return Ok(done),
            }
        }
        Err(Error::NumericalInstability(format!(
            "simplex did not terminate within {max_iter} iterations"
        )))
    }

    fn value(&self, j: usize) -> f64 {
        if self.in_basis[j] {
            let r = self.basis.iter().position(|&b| b == j).expect("basic");
            self.beta[r]
        } else if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }
}

pub(super) fn solve_dense(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.objective.len();
    let m = lp.constraints.len();
    for j in 0..n {
        if lp.lower[j] > lp.upper[j] + FEASIBILITY_TOL {
            return Ok(LpSolution::infeasible(n));
        }
    }

    // Row data after shifting by lower bounds and flipping to a nonnegative rhs.
    let slack_count = lp.constraints.iter().filter(|c| c.sense != Sense::Eq).count();
    let mut need_artificial = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut sign = Vec::with_capacity(m);
    for c in &lp.constraints {
        let shifted = c.rhs - c.coeffs.iter().map(|&(j, a)| a * lp.lower[j]).sum::<f64>();
        let s = if shifted < 0.0 { -1.0 } else { 1.0 };
        sign.push(s);
        rhs.push(shifted * s);
        // slack coefficient after the flip
        let slack_coeff = match c.sense {
            Sense::Le => s,
            Sense::Ge => -s,
            Sense::Eq => 0.0,
        };
        need_artificial.push(slack_coeff <= 0.0);
    }
    let art_count = need_artificial.iter().filter(|&&b| b).count();
    let cols = n + slack_count + art_count;
    let mut a = vec![0.0; m * cols];
    let mut upper = vec![f64::INFINITY; cols];
    for j in 0..n {
        upper[j] = (lp.upper[j] - lp.lower[j]).max(0.0);
    }
    let mut basis = vec![usize::MAX; m];
    let mut slack_col = n;
    let mut art_col = n + slack_count;
    for (i, c) in lp.constraints.iter().enumerate() {
        let row = &mut a[i * cols..(i + 1) * cols];
        for &(j, v) in &c.coeffs {
            row[j] += v * sign[i];
        }
        match c.sense {
            Sense::Eq => {}
            Sense::Le | Sense::Ge => {
                let coeff = if c.sense == Sense::Le { sign[i] } else { -sign[i] };
                row[slack_col] = coeff;
                if coeff > 0.0 {
                    basis[i] = slack_col;
                }
                slack_col += 1;
            }
        }
        if need_artificial[i] {
            row[art_col] = 1.0;
            basis[i] = art_col;
            art_col += 1;
        }
    }
    let mut in_basis = vec![false; cols];
    for &b in &basis {
        in_basis[b] = true;
    }
    let mut t = Tableau {
        rows: m,
        cols,
        a,
        beta: rhs,
        upper,
        at_upper: vec![false; cols],
        basis,
        in_basis,
        reduced: vec![0.0; cols],
        eligible: vec![true; cols],
    };
    let max_iter = 50 * (m + cols) + 1000;

    if art_count > 0 {
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(n + slack_count) {
            *c = 1.0;
        }
        t.set_costs(&phase1);
        t.run(max_iter)?;
        let infeasibility: f64 = (n + slack_count..cols).map(|j| t.value(j)).sum();
        let scale = 1.0 + t.beta.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > FEASIBILITY_TOL * scale {
            return Ok(LpSolution::infeasible(n));
        }
        for j in n + slack_count..cols {
            t.eligible[j] = false;
            t.upper[j] = 0.0;
        }
        for i in 0..m {
            if t.basis[i] >= n + slack_count {
                t.beta[i] = 0.0;
            }
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    t.set_costs(&cost);
    if let Step::Unbounded = t.run(max_iter)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: vec![0.0; n],
            objective_value: f64::NEG_INFINITY,
        });
    }

    let mut row_of = vec![usize::MAX; cols];
    for (i, &b) in t.basis.iter().enumerate() {
        row_of[b] = i;
    }
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let y = if row_of[j] != usize::MAX {
                t.beta[row_of[j]]
            } else if t.at_upper[j] {
                t.upper[j]
            } else {
                0.0
            };
            let x = lp.lower[j] + y.clamp(0.0, t.upper[j]);
            x.clamp(lp.lower[j], lp.upper[j])
        })
        .collect();
    let objective_value = values.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
    })
}
