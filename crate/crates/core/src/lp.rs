// Copyright 2026 The Bunching Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense two-phase simplex for small equality-form linear programs.
//!
//! Problems are `min c·x` subject to `A x = b`, `x ≥ 0`. Pivoting follows
//! Bland's rule (lowest eligible index enters, lowest basic index breaks
//! ratio ties), which cannot cycle. Sizes here are tens of variables, so a
//! full tableau is fine.

use crate::{Error, Result};

/// Feasibility and optimality tolerance.
pub const LP_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds the constraint `row · x = rhs`.
    pub fn add_equality(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        if row.len() != self.objective.len() {
            return Err(Error::Internal(format!(
                "constraint has {} coefficients for {} variables",
                row.len(),
                self.objective.len()
            )));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn minimize(&self) -> Result<LpSolution> {
        Tableau::new(self).solve(&self.objective)
    }

    pub fn maximize(&self) -> Result<LpSolution> {
        let neg: Vec<f64> = self.objective.iter().map(|c| -c).collect();
        let mut sol = Tableau::new(self).solve(&neg)?;
        sol.objective = -sol.objective;
        Ok(sol)
    }
}

struct Tableau {
    // m constraint rows followed by the reduced-cost row; last column is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let width = n + m + 1;
        let mut t = Vec::with_capacity(m + 1);
        for (i, (row, &b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            let mut r = vec![0.0; width];
            for (j, a) in row.iter().enumerate() {
                r[j] = sign * a;
            }
            r[n + i] = 1.0;
            r[width - 1] = sign * b;
            t.push(r);
        }
        // Phase-one costs: minimize the sum of artificials.
        let mut cost = vec![0.0; width];
        for r in &t {
            for j in 0..n {
                cost[j] -= r[j];
            }
            cost[width - 1] -= r[width - 1];
        }
        t.push(cost);
        Self {
            t,
            basis: (n..n + m).collect(),
            n,
        }
    }

    fn m(&self) -> usize {
        self.t.len() - 1
    }

    fn rhs_col(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations over columns `< allowed`.
    fn iterate(&mut self, allowed: usize) -> Result<()> {
        let rhs = self.rhs_col();
        let m = self.m();
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.t[m][j] < -LP_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - LP_TOL
                                || (ratio <= best + LP_TOL && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let (row, _) = leave.ok_or_else(|| Error::Internal("objective is unbounded".into()))?;
            self.pivot(row, col);
        }
        Err(Error::Internal(format!("no convergence after {MAX_PIVOTS} pivots")))
    }

    fn solve(mut self, objective: &[f64]) -> Result<LpSolution> {
        let n = self.n;
        let rhs = self.rhs_col();

        self.iterate(n + self.m())?;
        let m = self.m();
        let infeasibility = -self.t[m][rhs];
        if infeasibility > LP_TOL {
            return Err(Error::Internal(format!(
                "constraints are infeasible (residual {infeasibility:e})"
            )));
        }

        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.m() {
            if self.basis[i] >= n {
                match (0..n).find(|&j| self.t[i][j].abs() > PIVOT_TOL) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.t.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        let m = self.m();
        let mut cost = vec![0.0; rhs + 1];
        cost[..n].copy_from_slice(objective);
        for r in 0..m {
            let cb = objective[self.basis[r]];
            if cb != 0.0 {
                for (c, v) in cost.iter_mut().zip(&self.t[r]) {
                    *c -= cb * v;
                }
            }
        }
        self.t[m] = cost;
        self.iterate(n)?;

        let mut x = vec![0.0; n];
        for (r, &b) in self.basis.iter().enumerate() {
            x[b] = self.t[r][rhs].max(0.0);
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, objective: value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn lp(objective: &[f64], rows: &[(&[f64], f64)]) -> LinearProgram {
        let mut p = LinearProgram::new(objective.to_vec());
        for (r, b) in rows {
            p.add_equality(r.to_vec(), *b).unwrap();
        }
        p
    }

    #[test]
    fn textbook_two_variable() {
        // max x + y s.t. x + 2y ≤ 4, 3x + y ≤ 6.
        let p = lp(&[1.0, 1.0, 0.0, 0.0], &[(&[1.0, 2.0, 1.0, 0.0], 4.0), (&[3.0, 1.0, 0.0, 1.0], 6.0)]);
        let s = p.maximize().unwrap();
        assert!((s.objective - 2.8).abs() < 1e-12);
        assert!((s.x[0] - 1.6).abs() < 1e-12 && (s.x[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn beale_degenerate_problem_terminates() {
        let p = lp(
            &[0.0, 0.0, 0.0, -0.75, 150.0, -0.02, 6.0],
            &[
                (&[1.0, 0.0, 0.0, 0.25, -60.0, -0.04, 9.0], 0.0),
                (&[0.0, 1.0, 0.0, 0.5, -90.0, -0.02, 3.0], 0.0),
                (&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0], 1.0),
            ],
        );
        let s = p.minimize().unwrap();
        assert!((s.objective + 0.05).abs() < 1e-12, "{}", s.objective);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(&[1.0], &[(&[1.0], -1.0)]);
        assert!(matches!(p.minimize(), Err(Error::Internal(_))));
        let p = lp(&[-1.0, 0.0], &[(&[1.0, -1.0], 0.0)]);
        assert!(matches!(p.minimize(), Err(Error::Internal(_))));
    }

    #[test]
    fn redundant_rows() {
        let p = lp(&[1.0, 0.0], &[(&[1.0, 1.0], 1.0), (&[2.0, 2.0], 2.0)]);
        let s = p.minimize().unwrap();
        assert!(s.objective.abs() < 1e-12);
        assert!((s.x[1] - 1.0).abs() < 1e-12);
        assert!((p.maximize().unwrap().objective - 1.0).abs() < 1e-12);
    }

    // Vertex enumeration: every basic solution of [A | I] x = b.
    fn brute_force_min(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
        let m = a.len();
        let n = c.len();
        let cols = n + m;
        let full = |i: usize, j: usize| if j < n { a[i][j] } else if j - n == i { 1.0 } else { 0.0 };
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << cols) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let chosen: Vec<usize> = (0..cols).filter(|j| mask >> j & 1 == 1).collect();
            let basis = DMatrix::from_fn(m, m, |i, k| full(i, chosen[k]));
            let Some(sol) = basis.lu().solve(&DVector::from_column_slice(b)) else { continue };
            if sol.iter().any(|v| !v.is_finite() || *v < -1e-9) {
                continue;
            }
            let residual = (0..m)
                .map(|i| (chosen.iter().zip(sol.iter()).map(|(&j, v)| full(i, j) * v).sum::<f64>() - b[i]).abs())
                .fold(0.0, f64::max);
            if residual > 1e-9 {
                continue;
            }
            let value: f64 = chosen.iter().zip(sol.iter()).filter(|(&j, _)| j < n).map(|(&j, v)| c[j] * v).sum();
            best = best.min(value);
        }
        best
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            n in 2usize..4,
            seed_rows in proptest::collection::vec(proptest::collection::vec(-3i32..4, 3), 1..4),
            rhs in proptest::collection::vec(1i32..10, 3),
            cost in proptest::collection::vec(-5i32..6, 3),
        ) {
            // A x ≤ b plus x_j ≤ 10, with slacks.
            let mut a: Vec<Vec<f64>> = seed_rows.iter().map(|r| r[..n].iter().map(|&v| v as f64).collect()).collect();
            let mut b: Vec<f64> = rhs[..a.len()].iter().map(|&v| v as f64).collect();
            for j in 0..n {
                let mut r = vec![0.0; n];
                r[j] = 1.0;
                a.push(r);
                b.push(10.0);
            }
            let c: Vec<f64> = cost[..n].iter().map(|&v| v as f64).collect();
            let m = a.len();
            let mut obj = c.clone();
            obj.extend(std::iter::repeat_n(0.0, m));
            let mut p = LinearProgram::new(obj);
            for (i, row) in a.iter().enumerate() {
                let mut r = row.clone();
                r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
                p.add_equality(r, b[i]).unwrap();
            }
            let s = p.minimize().unwrap();
            let oracle = brute_force_min(&a, &b, &c);
            prop_assert!((s.objective - oracle).abs() < 1e-7, "simplex {} vs oracle {}", s.objective, oracle);
        }
    }
}
