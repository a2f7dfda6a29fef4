//! Dense two-phase primal simplex over exact rationals.
//!
//! Solves `maximize c·x subject to A x = b, x >= 0`. Pivoting follows
//! Bland's rule (lowest eligible entering column, lowest basic index among
//! tied leaving rows), so runs are deterministic and never cycle.

use num_traits::{Signed, Zero};

use crate::model::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub constraints: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows[r]` holds the constraint coefficients followed by the rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs `z_j - c_j` followed by the current objective value.
    costs: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns at or beyond this index never enter.
    active_columns: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Tableau {
    fn width(&self) -> usize {
        self.costs.len() - 1
    }

    fn set_objective(&mut self, objective: &[Rational]) {
        let width = self.width();
        let mut costs = vec![Rational::zero(); width + 1];
        for (j, c) in objective.iter().enumerate() {
            costs[j] = -c.clone();
        }
        for (r, &b) in self.basis.iter().enumerate() {
            let factor = costs[b].clone();
            if !factor.is_zero() {
                for (cost, entry) in costs.iter_mut().zip(&self.rows[r]) {
                    *cost -= &factor * entry;
                }
            }
        }
        self.costs = costs;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.rows[row][col].clone();
        for entry in self.rows[row].iter_mut() {
            *entry /= &pivot;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (entry, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *entry -= &factor * p;
                }
            }
        }
        if !self.costs[col].is_zero() {
            let factor = self.costs[col].clone();
            for (entry, p) in self.costs.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *entry -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    fn step(&mut self) -> Step {
        let Some(col) = (0..self.active_columns).find(|&j| self.costs[j].is_negative()) else {
            return Step::Optimal;
        };
        let rhs = self.width();
        let mut best: Option<(usize, Rational)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[col];
            let better = match &best {
                None => true,
                Some((b, current)) => {
                    ratio < *current || (ratio == *current && self.basis[r] < self.basis[*b])
                }
            };
            if better {
                best = Some((r, ratio));
            }
        }
        match best {
            None => Step::Unbounded,
            Some((row, _)) => {
                self.pivot(row, col);
                Step::Pivoted
            }
        }
    }

    fn run(&mut self) -> bool {
        loop {
            match self.step() {
                Step::Optimal => return true,
                Step::Unbounded => return false,
                Step::Pivoted => {}
            }
        }
    }
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let rows = lp.constraints.len();
    let vars = lp.objective.len();
    assert_eq!(lp.rhs.len(), rows, "one rhs per constraint");
    assert!(
        lp.constraints.iter().all(|r| r.len() == vars),
        "ragged constraint matrix"
    );

    // Phase 1: one artificial per row, minimise their sum.
    let width = vars + rows;
    let mut table = Vec::with_capacity(rows);
    for (r, (coeffs, b)) in lp.constraints.iter().zip(&lp.rhs).enumerate() {
        let flip = b.is_negative();
        let mut row = Vec::with_capacity(width + 1);
        row.extend(
            coeffs
                .iter()
                .map(|a| if flip { -a.clone() } else { a.clone() }),
        );
        row.extend((0..rows).map(|k| {
            if k == r {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        }));
        row.push(if flip { -b.clone() } else { b.clone() });
        table.push(row);
    }
    let mut tab = Tableau {
        rows: table,
        costs: vec![Rational::zero(); width + 1],
        basis: (vars..width).collect(),
        active_columns: width,
    };
    let mut phase1 = vec![Rational::zero(); width];
    for c in phase1.iter_mut().skip(vars) {
        *c = Rational::from_integer((-1).into());
    }
    tab.set_objective(&phase1);
    tab.run();
    if !tab.costs[width].is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= vars {
            match (0..vars).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(col) => {
                    tab.pivot(r, col);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // Phase 2 on the original columns.
    tab.active_columns = vars;
    let mut objective = lp.objective.clone();
    objective.resize(width, Rational::zero());
    tab.set_objective(&objective);
    if !tab.run() {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Rational::zero(); vars];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        if b < vars {
            point[b] = row[width].clone();
        }
    }
    LpOutcome::Optimal {
        value: tab.costs[width].clone(),
        point,
    }
}
