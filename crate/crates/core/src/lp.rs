//! Small dense linear programs: two-phase tableau simplex with Bland's rule.
//!
//! Problems have the form `min c^T x` subject to row constraints `a_i^T x (<=|>=|=) b_i`,
//! `x >= 0` and optional upper bounds `x <= u`. Intended for a few hundred variables.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
            upper: None,
        }
    }

    pub fn constraint(mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn upper_bounds(mut self, upper: Vec<f64>) -> Self {
        self.upper = Some(upper);
        self
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self)?.run(&self.objective)
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_vars: usize,
    n_cols: usize,
    artificial_start: usize,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Result<Self> {
        let n = lp.objective.len();
        let mut rows_in: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
        for (i, c) in lp.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
            rows_in.push((c.coeffs.clone(), c.relation, c.rhs));
        }
        if let Some(u) = &lp.upper {
            if u.len() != n {
                return Err(Error::DimensionMismatch("upper bounds length".into()));
            }
            for (j, &uj) in u.iter().enumerate() {
                if uj.is_finite() {
                    let mut coeffs = vec![0.0; n];
                    coeffs[j] = 1.0;
                    rows_in.push((coeffs, Relation::Le, uj));
                }
            }
        }
        // Normalise to rhs >= 0.
        for (coeffs, rel, rhs) in rows_in.iter_mut() {
            if *rhs < 0.0 {
                coeffs.iter_mut().for_each(|x| *x = -*x);
                *rhs = -*rhs;
                *rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        let m = rows_in.len();
        let n_slack = rows_in.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows_in.iter().filter(|r| r.1 != Relation::Le).count();
        let artificial_start = n + n_slack;
        let n_cols = artificial_start + n_art;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, artificial_start);
        for (coeffs, rel, rhs) in rows_in {
            let mut row = vec![0.0; n_cols + 1];
            row[..n].copy_from_slice(&coeffs);
            row[n_cols] = rhs;
            match rel {
                Relation::Le => {
                    row[s] = 1.0;
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -1.0;
                    s += 1;
                    row[a] = 1.0;
                    basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = 1.0;
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
        }
        Ok(Tableau {
            rows,
            basis,
            n_vars: n,
            n_cols,
            artificial_start,
            pivots: 0,
        })
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = (0..=self.n_cols)
            .map(|j| cost.get(j).copied().unwrap_or(0.0))
            .collect();
        r[self.n_cols] = 0.0;
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost.get(b).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (rj, &x) in r.iter_mut().zip(row) {
                    *rj -= cb * x;
                }
            }
        }
        r
    }

    fn pivot(&mut self, pr: usize, pc: usize, costs: &mut [f64]) {
        let p = self.rows[pr][pc];
        for x in self.rows[pr].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.rows[pr].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != pr {
                let f = row[pc];
                if f != 0.0 {
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                    row[pc] = 0.0;
                }
            }
        }
        let f = costs[pc];
        if f != 0.0 {
            for (x, &y) in costs.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
            costs[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Bland-rule simplex over columns `< col_limit`. Returns false if unbounded.
    fn optimize(&mut self, costs: &mut [f64], col_limit: usize) -> Result<bool> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Infeasible("simplex pivot limit reached".into()));
            }
            let Some(pc) = (0..col_limit).find(|&j| costs[j] < -EPS) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[pc];
                if a > EPS {
                    let ratio = row[self.n_cols] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Ok(false),
                Some((pr, _)) => self.pivot(pr, pc, costs),
            }
        }
    }

    fn run(mut self, objective: &[f64]) -> Result<LpSolution> {
        // Phase 1: minimise the sum of artificials.
        if self.artificial_start < self.n_cols {
            let phase1: Vec<f64> = (0..self.n_cols)
                .map(|j| if j >= self.artificial_start { 1.0 } else { 0.0 })
                .collect();
            let mut costs = self.reduced_costs(&phase1);
            self.optimize(&mut costs, self.n_cols)?;
            let infeas = -costs[self.n_cols];
            let scale = self
                .rows
                .iter()
                .map(|r| r[self.n_cols].abs())
                .fold(1.0, f64::max);
            if infeas > 1e-9 * scale {
                return Err(Error::Infeasible(format!(
                    "no feasible point (phase-one residual {infeas:e})"
                )));
            }
            // Drive remaining artificials out of the basis.
            let mut dummy = vec![0.0; self.n_cols + 1];
            for i in 0..self.rows.len() {
                if self.basis[i] >= self.artificial_start {
                    if let Some(pc) =
                        (0..self.artificial_start).find(|&j| self.rows[i][j].abs() > 1e-9)
                    {
                        self.pivot(i, pc, &mut dummy);
                    }
                }
            }
        }
        let mut costs = self.reduced_costs(objective);
        if !self.optimize(&mut costs, self.artificial_start)? {
            return Err(Error::Unbounded);
        }
        let mut x = vec![0.0; self.n_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_vars {
                x[b] = row[self.n_cols].max(0.0);
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective: value,
            pivots: self.pivots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
        let lp = LinearProgram::new(vec![-3.0, -5.0])
            .constraint(vec![1.0, 0.0], Relation::Le, 4.0)
            .constraint(vec![0.0, 2.0], Relation::Le, 12.0)
            .constraint(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.objective + 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn covering_with_bounds() {
        // min x1 + 2 x2 + 3 x3, x1 + x2 >= 1.5, x2 + x3 >= 1, 0 <= x <= 1
        let lp = LinearProgram::new(vec![1.0, 2.0, 3.0])
            .constraint(vec![1.0, 1.0, 0.0], Relation::Ge, 1.5)
            .constraint(vec![0.0, 1.0, 1.0], Relation::Ge, 1.0)
            .upper_bounds(vec![1.0; 3]);
        let s = lp.solve().unwrap();
        // x2 = 1, x1 = 0.5 -> 2.5
        assert!((s.objective - 2.5).abs() < 1e-12, "{:?}", s);
    }

    #[test]
    fn equality_and_infeasible() {
        let lp = LinearProgram::new(vec![1.0, 1.0]).constraint(vec![1.0, -1.0], Relation::Eq, 2.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 2.0).abs() < 1e-12);

        let bad = LinearProgram::new(vec![1.0])
            .constraint(vec![1.0], Relation::Ge, 2.0)
            .upper_bounds(vec![1.0]);
        assert!(matches!(bad.solve(), Err(Error::Infeasible(_))));

        let unbounded = LinearProgram::new(vec![-1.0]).constraint(vec![1.0], Relation::Ge, 0.0);
        assert!(matches!(unbounded.solve(), Err(Error::Unbounded)));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) under the largest-coefficient rule.
        let lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0])
            .constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective + 0.05).abs() < 1e-12, "{}", s.objective);
    }
}
