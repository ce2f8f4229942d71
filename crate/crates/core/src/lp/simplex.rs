//! Dense two-phase primal simplex with Bland's rule.
//!
//! With an exact scalar the method is exact and cannot cycle; with floats all
//! sign tests use the scalar's tolerance.

use serde::Serialize;

use super::program::{LinearProgram, Relation};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Values of the program's variables (empty unless optimal).
    pub values: Vec<S>,
    pub objective: S,
    pub pivots: usize,
}

const MAX_PIVOTS: usize = 200_000;

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    /// Reduced costs, plus the negated objective value.
    cost: Vec<S>,
    cost_rhs: S,
    pivots: usize,
}

fn is_neg<S: Scalar>(v: &S) -> bool {
    *v < -S::tolerance()
}

fn is_pos<S: Scalar>(v: &S) -> bool {
    *v > S::tolerance()
}

fn snap<S: Scalar>(v: S) -> S {
    if !S::EXACT && v.abs() <= S::tolerance() {
        S::zero()
    } else {
        v
    }
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = S::one() / self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() * inv;
        self.rows[r][c] = S::one();
        let support: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let (pivot_row, pivot_rhs) = (self.rows[r].clone(), self.rhs[r].clone());
        let eliminate = |row: &mut Vec<S>, rhs: &mut S| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                row[j] = snap(row[j].clone() - factor.clone() * pivot_row[j].clone());
            }
            row[c] = S::zero();
            *rhs = snap(rhs.clone() - factor * pivot_rhs.clone());
        };
        for i in 0..self.rows.len() {
            if i != r {
                let (row, rhs) = (&mut self.rows[i], &mut self.rhs[i]);
                eliminate(row, rhs);
            }
        }
        eliminate(&mut self.cost, &mut self.cost_rhs);
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< limit`.
    fn optimize(&mut self, limit: usize) -> LpStatus {
        loop {
            if self.pivots >= MAX_PIVOTS {
                return LpStatus::IterationLimit;
            }
            let Some(enter) = (0..limit).find(|&j| is_neg(&self.cost[j])) else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !is_pos(a) {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*best_i]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return LpStatus::Unbounded,
            }
        }
    }

    fn set_costs(&mut self, costs: &[S]) {
        self.cost = costs.to_vec();
        self.cost_rhs = S::zero();
        for i in 0..self.rows.len() {
            let cb = costs[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.cost.len() {
                if !self.rows[i][j].is_zero() {
                    self.cost[j] = self.cost[j].clone() - cb.clone() * self.rows[i][j].clone();
                }
            }
            self.cost_rhs = self.cost_rhs.clone() - cb * self.rhs[i].clone();
        }
    }
}

/// Solves `lp` to an optimal basic solution.
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> LpSolution<S> {
    let n = lp.num_variables();
    let m = lp.num_constraints();

    // Orient rows so every right-hand side is nonnegative and, where possible,
    // the slack column can start in the basis.
    let mut oriented = Vec::with_capacity(m);
    for c in &lp.constraints {
        let flip = c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge);
        let sign = if flip { -S::one() } else { S::one() };
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        let mut dense = vec![S::zero(); n];
        for (j, a) in &c.coeffs {
            dense[*j] = dense[*j].clone() + a.clone() * sign.clone();
        }
        oriented.push((dense, relation, c.rhs.clone() * sign));
    }
    let slack_count = oriented.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    let artificial_count = oriented.iter().filter(|(_, r, _)| *r != Relation::Le).count();
    let first_artificial = n + slack_count;
    let width = first_artificial + artificial_count;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n, first_artificial);
    for (dense, relation, b) in oriented {
        let mut row = dense;
        row.resize(width, S::zero());
        match relation {
            Relation::Le => {
                row[next_slack] = S::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -S::one();
                next_slack += 1;
                row[next_art] = S::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = S::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
        rhs.push(b);
    }

    let mut t = Tableau { rows, rhs, basis, cost: Vec::new(), cost_rhs: S::zero(), pivots: 0 };
    let fail = |status, pivots| LpSolution { status, values: Vec::new(), objective: S::zero(), pivots };

    if artificial_count > 0 {
        let mut phase_one = vec![S::zero(); width];
        for c in phase_one.iter_mut().skip(first_artificial) {
            *c = S::one();
        }
        t.set_costs(&phase_one);
        match t.optimize(width) {
            LpStatus::Optimal => {}
            status => return fail(status, t.pivots),
        }
        if is_pos(&(-t.cost_rhs.clone())) {
            return fail(LpStatus::Infeasible, t.pivots);
        }
        // Pivot zero-valued artificials out where a structural column allows it;
        // rows where none does are redundant and keep their artificial at zero.
        for r in 0..m {
            if t.basis[r] >= first_artificial {
                if let Some(c) =
                    (0..first_artificial).find(|&j| !t.rows[r][j].is_zero() && (S::EXACT || t.rows[r][j].abs() > S::tolerance()))
                {
                    t.pivot(r, c);
                }
            }
        }
    }

    let mut costs = lp.objective.clone();
    costs.resize(width, S::zero());
    t.set_costs(&costs);
    match t.optimize(first_artificial) {
        LpStatus::Optimal => {}
        status => return fail(status, t.pivots),
    }
    let mut values = vec![S::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            values[b] = t.rhs[r].clone();
        }
    }
    let objective = lp.objective_value(&values);
    LpSolution { status: LpStatus::Optimal, values, objective, pivots: t.pivots }
}
