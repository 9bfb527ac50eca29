//! Small dense two-phase simplex solver.
//!
//! Problems here have a handful of variables and rows (a few generators in
//! dimension at most eight), so a full tableau with Bland's rule is both
//! simple and fast enough. Bland's rule guarantees termination on the
//! degenerate programs that show up constantly (points exactly on faces,
//! duplicated generators).

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau {
    /// Row-major, `rows x (cols + 1)`; the last column is the right-hand side.
    data: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    structural: usize,
    /// Columns at or past this index are artificial.
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let structural = lp.objective.len();
        let rows = lp.constraints.len();

        // Normalize every row to a nonnegative right-hand side first.
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();

        let slacks = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Eq)
            .count();
        let artificials = normalized
            .iter()
            .filter(|(_, r, _)| *r != Relation::Le)
            .count();
        let cols = structural + slacks + artificials;
        let first_artificial = structural + slacks;
        let width = cols + 1;

        let mut data = vec![0.0; rows * width];
        let mut basis = vec![0; rows];
        let mut next_slack = structural;
        let mut next_artificial = first_artificial;
        for (i, (coeffs, relation, rhs)) in normalized.iter().enumerate() {
            let row = &mut data[i * width..(i + 1) * width];
            row[..structural].copy_from_slice(coeffs);
            row[cols] = *rhs;
            match relation {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_artificial] = 1.0;
                    basis[i] = next_artificial;
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = 1.0;
                    basis[i] = next_artificial;
                    next_artificial += 1;
                }
            }
        }

        Self {
            data,
            rows,
            cols,
            basis,
            structural,
            first_artificial,
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, reduced: &mut [f64], r: usize, c: usize) {
        let width = self.cols + 1;
        let p = self.at(r, c);
        for v in &mut self.data[r * width..(r + 1) * width] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[r * width..(r + 1) * width].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.at(i, c);
            if f != 0.0 {
                let row = &mut self.data[i * width..(i + 1) * width];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = reduced[c];
        if f != 0.0 {
            for (v, pv) in reduced.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            reduced[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row (`cols + 1` entries, last one is minus the objective
    /// value) for the given cost vector under the current basis.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut reduced = costs.to_vec();
        reduced.push(0.0);
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                for (j, v) in reduced.iter_mut().enumerate() {
                    *v -= cb * self.at(i, j);
                }
            }
        }
        reduced
    }

    /// Runs simplex iterations with Bland's rule over columns `< allowed`.
    /// Returns `false` if the objective is unbounded.
    fn iterate(&mut self, reduced: &mut [f64], allowed: usize) -> Result<bool> {
        let limit = 50 * (self.rows + self.cols + 10);
        for _ in 0..limit {
            let Some(enter) = (0..allowed).find(|&j| reduced[j] > PIVOT_EPS) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, enter);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(reduced, r, enter),
            }
        }
        Err(Error::LpNumericalFailure(format!(
            "no convergence after {limit} pivots"
        )))
    }

    fn solve(mut self, objective: &[f64]) -> Result<LpOutcome> {
        if self.first_artificial < self.cols {
            let mut phase_one = vec![0.0; self.cols];
            for c in &mut phase_one[self.first_artificial..] {
                *c = -1.0;
            }
            let mut reduced = self.reduced_costs(&phase_one);
            self.iterate(&mut reduced, self.cols)?;
            // reduced[cols] holds minus the phase-one objective.
            if reduced[self.cols] > FEASIBILITY_EPS {
                return Ok(LpOutcome::Infeasible);
            }
            self.evict_artificials();
        }

        let mut costs = vec![0.0; self.cols];
        costs[..self.structural].copy_from_slice(objective);
        let mut reduced = self.reduced_costs(&costs);
        if !self.iterate(&mut reduced, self.first_artificial)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut x = vec![0.0; self.structural];
        for i in 0..self.rows {
            if self.basis[i] < self.structural {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal { x, value })
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent and get dropped.
    fn evict_artificials(&mut self) {
        let mut scratch = vec![0.0; self.cols + 1];
        let mut i = 0;
        while i < self.rows {
            if self.basis[i] >= self.first_artificial {
                let replacement = (0..self.first_artificial)
                    .filter(|&j| self.at(i, j).abs() > PIVOT_EPS)
                    .max_by(|&a, &b| self.at(i, a).abs().total_cmp(&self.at(i, b).abs()));
                match replacement {
                    Some(j) => self.pivot(&mut scratch, i, j),
                    None => {
                        self.drop_row(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    fn drop_row(&mut self, r: usize) {
        let width = self.cols + 1;
        self.data.drain(r * width..(r + 1) * width);
        self.basis.remove(r);
        self.rows -= 1;
    }
}
