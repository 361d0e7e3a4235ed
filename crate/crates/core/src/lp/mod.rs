//! Linear programs with box bounds, a dense simplex solver, and binary branch-and-bound.

mod milp;
mod simplex;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet};

pub use milp::{solve_binary, BinaryOutcome};

/// Constraint rows are satisfied to this absolute tolerance (scaled by the row magnitude).
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `min objective·x` subject to the rows and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// A program over `n` variables, each bounded to `[0, 1]`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self
    }

    /// Adds a row from a dense coefficient vector, dropping zeros.
    pub fn add_dense_row(&mut self, coeffs: &[f64], sense: Sense, rhs: f64) -> &mut Self {
        let sparse = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(j, &a)| (j, a))
            .collect();
        self.add_row(sparse, sense, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.lower[var] = lo;
        self.upper[var] = hi;
        self
    }

    pub fn fix(&mut self, var: usize, value: f64) -> &mut Self {
        self.set_bounds(var, value, value)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidParameter("bound vectors do not match the objective".into()));
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || hi.is_nan() || lo > hi {
                return Err(Error::InvalidParameter(format!("bad bounds [{lo}, {hi}] on x{j}")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(&(j, _)) = c.coeffs.iter().find(|&&(j, _)| j >= n) {
                return Err(Error::InvalidParameter(format!("row {i} references x{j} of {n}")));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|&(_, a)| !a.is_finite()) {
                return Err(Error::InvalidParameter(format!("row {i} has a non-finite entry")));
            }
        }
        Ok(())
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.violation(x));
        let bounds = x
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.lower[j] - v).max(v - self.upper[j]).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Renders the program in the CPLEX LP text format, readable by most external solvers.
    pub fn to_lp_format(&self) -> String {
        fn term(out: &mut String, first: bool, coeff: f64, var: usize) {
            if coeff < 0.0 {
                out.push_str(" -");
            } else if !first {
                out.push_str(" +");
            }
            if coeff.abs() != 1.0 {
                let _ = write!(out, " {}", coeff.abs());
            }
            let _ = write!(out, " x{var}");
        }
        let mut out = String::from("\\ generated by pathcut\nMinimize\n obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                term(&mut out, first, c, j);
                first = false;
            }
        }
        if first {
            out.push_str(" 0 x0");
        }
        out.push_str("\nSubject To\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " c{i}:");
            if c.coeffs.is_empty() {
                out.push_str(" 0 x0");
            }
            for (k, &(j, a)) in c.coeffs.iter().enumerate() {
                term(&mut out, k == 0, a, j);
            }
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for j in 0..self.num_vars() {
            if self.upper[j].is_finite() {
                let _ = writeln!(out, " {} <= x{j} <= {}", self.lower[j], self.upper[j]);
            } else {
                let _ = writeln!(out, " x{j} >= {}", self.lower[j]);
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    pub(crate) fn infeasible(n: usize) -> Self {
        LpSolution {
            status: LpStatus::Infeasible,
            values: vec![0.0; n],
            objective_value: f64::INFINITY,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `lp` to optimality or reports infeasibility / unboundedness.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let sol = simplex::solve_dense(lp)?;
    if sol.is_optimal() {
        let scale = 1.0
            + lp
                .constraints
                .iter()
                .map(|c| c.rhs.abs())
                .fold(0.0, f64::max);
        let violation = lp.max_violation(&sol.values);
        if violation > FEASIBILITY_TOL * scale {
            return Err(Error::NumericalInstability(format!(
                "solution violates a constraint by {violation:e}"
            )));
        }
    }
    Ok(sol)
}

/// Relaxed covering program: minimize `Σ c_e Δ_e` with `Σ_{e∈row} Δ_e >= 1` for every
/// row, `Δ ∈ [0,1]`, and `Δ_e = 0` for protected edges. `values` is indexed by edge id.
pub fn solve_cover_lp(costs: &[f64], rows: &[Vec<EdgeId>], keep: &EdgeSet) -> Result<LpSolution> {
    let mut var_of = vec![usize::MAX; costs.len()];
    let mut edges = Vec::new();
    let mut sparse_rows = Vec::with_capacity(rows.len());
    for row in rows {
        let mut coeffs = Vec::with_capacity(row.len());
        for &e in row {
            if e >= costs.len() {
                return Err(Error::UnknownEdge(e));
            }
            if keep.contains(&e) {
                continue;
            }
            if var_of[e] == usize::MAX {
                var_of[e] = edges.len();
                edges.push(e);
            }
            coeffs.push((var_of[e], 1.0));
        }
        if coeffs.is_empty() {
            return Err(Error::InfeasibleCover);
        }
        coeffs.sort_unstable_by_key(|&(j, _)| j);
        coeffs.dedup_by_key(|&mut (j, _)| j);
        sparse_rows.push(coeffs);
    }
    let mut lp = LinearProgram::new(edges.iter().map(|&e| costs[e]).collect());
    for coeffs in sparse_rows {
        lp.add_row(coeffs, Sense::Ge, 1.0);
    }
    let sol = solve(&lp)?;
    let mut values = vec![0.0; costs.len()];
    for (j, &e) in edges.iter().enumerate() {
        values[e] = sol.values[j];
    }
    Ok(LpSolution {
        status: sol.status,
        values,
        objective_value: sol.objective_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{incidence, Graph};
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_variable_cover() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_dense_row(&[1.0, 1.0], Sense::Ge, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bound_conflict_is_infeasible() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_dense_row(&[1.0], Sense::Ge, 2.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        lp.add_dense_row(&[1.0, -1.0], Sense::Le, 3.0);
        lp.set_bounds(1, 0.0, f64::INFINITY);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_shifted_bounds() {
        // min x + 2y s.t. x + y = 5, x in [1,3], y in [1,10]  ->  x=3, y=2
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.set_bounds(0, 1.0, 3.0).set_bounds(1, 1.0, 10.0);
        lp.add_dense_row(&[1.0, 1.0], Sense::Eq, 5.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.values[0] - 3.0).abs() < 1e-9 && (sol.values[1] - 2.0).abs() < 1e-9);
        assert!((sol.objective_value - 7.0).abs() < 1e-9);
    }

    #[test]
    fn shortest_path_flow_is_integral() {
        // triangle 0-1-2 plus a long direct edge 0-2; directed flow from 0 to 2
        let g = Graph::from_edges(true, 3, [(0, 1, 1.0, 1.0), (1, 2, 1.0, 1.0), (0, 2, 3.0, 1.0)]).unwrap();
        let c = incidence(&g).unwrap();
        let mut lp = LinearProgram::new(g.weights());
        for v in 0..3 {
            let row: Vec<f64> = c.row(v).iter().map(|&x| x as f64).collect();
            let d = match v {
                0 => -1.0,
                2 => 1.0,
                _ => 0.0,
            };
            lp.add_dense_row(&row, Sense::Eq, d);
        }
        let sol = solve(&lp).unwrap();
        let want = [1.0, 1.0, 0.0];
        for (x, w) in sol.values.iter().zip(want) {
            assert!((x - w).abs() < 1e-9, "{:?}", sol.values);
        }
    }

    #[test]
    fn cover_puts_mass_on_cheaper_edge() {
        let sol = solve_cover_lp(&[3.0, 1.0], &[vec![0, 1]], &EdgeSet::new()).unwrap();
        assert_eq!(sol.values, vec![0.0, 1.0]);
        assert_eq!(sol.objective_value, 1.0);
    }

    #[test]
    fn fully_protected_row_is_rejected() {
        let err = solve_cover_lp(&[1.0], &[vec![0]], &EdgeSet::from([0])).unwrap_err();
        assert!(matches!(err, Error::InfeasibleCover));
    }

    /// Minimum of the cover LP over every vertex of its polytope.
    fn vertex_enumeration_optimum(costs: &[f64], rows: &[Vec<usize>]) -> f64 {
        let n = costs.len();
        // every facet as (a, b) meaning a·x = b when active, a·x >= b feasible
        let mut facets: Vec<(Vec<f64>, f64)> = Vec::new();
        for row in rows {
            let mut a = vec![0.0; n];
            for &e in row {
                a[e] = 1.0;
            }
            facets.push((a, 1.0));
        }
        for j in 0..n {
            let mut lo = vec![0.0; n];
            lo[j] = 1.0;
            facets.push((lo, 0.0));
            let mut hi = vec![0.0; n];
            hi[j] = -1.0;
            facets.push((hi, -1.0));
        }
        let feasible = |x: &DVector<f64>| {
            facets
                .iter()
                .all(|(a, b)| a.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() >= b - 1e-9)
        };
        let mut best = f64::INFINITY;
        let m = facets.len();
        let mut choice: Vec<usize> = (0..n).collect();
        loop {
            let a = DMatrix::from_fn(n, n, |i, j| facets[choice[i]].0[j]);
            let b = DVector::from_fn(n, |i, _| facets[choice[i]].1);
            if let Some(x) = a.lu().solve(&b) {
                if feasible(&x) {
                    best = best.min(x.iter().zip(costs).map(|(p, q)| p * q).sum());
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if choice[i] < m - n + i {
                    choice[i] += 1;
                    for k in i + 1..n {
                        choice[k] = choice[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn cover_matches_vertex_enumeration() {
        for seed in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let costs: Vec<f64> = (0..8).map(|_| rng.gen_range(1..=9) as f64).collect();
            let rows: Vec<Vec<usize>> = (0..4)
                .map(|_| {
                    let mut r: Vec<usize> = (0..8).filter(|_| rng.gen_bool(0.4)).collect();
                    if r.is_empty() {
                        r.push(rng.gen_range(0..8));
                    }
                    r
                })
                .collect();
            let sol = solve_cover_lp(&costs, &rows, &EdgeSet::new()).unwrap();
            let oracle = vertex_enumeration_optimum(&costs, &rows);
            assert!((sol.objective_value - oracle).abs() < 1e-7, "seed {seed}: {} vs {oracle}", sol.objective_value);
        }
    }

    #[test]
    fn lp_format_lists_every_row() {
        let mut lp = LinearProgram::new(vec![3.0, -1.0]);
        lp.add_dense_row(&[1.0, 2.5], Sense::Ge, 1.0);
        let text = lp.to_lp_format();
        assert!(text.contains("obj: 3 x0 - x1"));
        assert!(text.contains("c0: x0 + 2.5 x1 >= 1"));
        assert!(text.contains("0 <= x1 <= 1"));
        assert!(text.ends_with("End\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_programs_are_feasible_and_consistent(
            seed in 0u64..10_000,
            n in 2usize..8,
            m in 1usize..7,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let obj: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mut lp = LinearProgram::new(obj);
            // rows satisfied by a known interior point, so the program is feasible
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..0.9)).collect();
            for _ in 0..m {
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let act: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
                let sense = if rng.gen_bool(0.5) { Sense::Le } else { Sense::Ge };
                let rhs = match sense { Sense::Le => act + 0.5, _ => act - 0.5 };
                lp.add_dense_row(&a, sense, rhs);
            }
            let sol = solve(&lp).unwrap();
            prop_assert_eq!(sol.status, LpStatus::Optimal);
            prop_assert!(lp.max_violation(&sol.values) <= 1e-7);
            let direct: f64 = sol.values.iter().zip(&lp.objective).map(|(p, q)| p * q).sum();
            prop_assert!((direct - sol.objective_value).abs() <= 1e-9 * (1.0 + direct.abs()));
            let at_x0: f64 = x0.iter().zip(&lp.objective).map(|(p, q)| p * q).sum();
            prop_assert!(sol.objective_value <= at_x0 + 1e-9);
        }
    }
}
