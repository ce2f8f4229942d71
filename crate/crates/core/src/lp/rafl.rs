use serde::Serialize;

use super::program::{LinearProgram, Relation};
use super::simplex::{solve_lp, LpStatus};
use crate::error::{Error, Result};
use crate::model::{PacketId, RaflInstance};
use crate::scalar::Scalar;

/// The facility location relaxation plus the map from `(t, f)` and `(f, p)`
/// back to variable indices.
#[derive(Debug, Clone)]
pub struct RaflLp<S> {
    pub lp: LinearProgram<S>,
    /// `x_var[t][f]`.
    pub x_var: Vec<Vec<usize>>,
    /// `y_var[f][p]`, packets in universe order.
    pub y_var: Vec<Vec<usize>>,
    pub packets: Vec<PacketId>,
}

/// Relaxation with `x[t][f]` (assignment) and `y[f][p]` (production) variables:
///
/// ```text
/// minimize   sum_f sum_p lambda_f w_p y[f][p] + sum_t sum_f w(D(t)) c(t,f) x[t][f]
/// subject to sum_f x[t][f] >= 1              for every t
///            y[f][p] >= x[t][f]              for every t, f and p in D(t)
/// ```
///
/// Packet weights enter as coefficients instead of expanding each packet into
/// unit copies.
pub fn build_rafl_lp<S: Scalar>(inst: &RaflInstance<S>) -> RaflLp<S> {
    let packets: Vec<PacketId> = inst.universe().ids().collect();
    let mut lp = LinearProgram::new();
    let x_var: Vec<Vec<usize>> = inst
        .terminals()
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            let dw = S::from_weight(inst.demand_weight(ti));
            inst.facilities()
                .iter()
                .enumerate()
                .map(|(fi, f)| lp.add_variable(format!("x_{}_{}", t.id, f.id), dw.clone() * inst.distance(ti, fi).clone()))
                .collect()
        })
        .collect();
    let y_var: Vec<Vec<usize>> = inst
        .facilities()
        .iter()
        .map(|f| {
            packets
                .iter()
                .map(|&p| {
                    let w = S::from_weight(inst.universe().weight(p).expect("universe packet"));
                    lp.add_variable(format!("y_{}_{}", f.id, p), f.lambda.clone() * w)
                })
                .collect()
        })
        .collect();
    for (ti, t) in inst.terminals().iter().enumerate() {
        let row = x_var[ti].iter().map(|&v| (v, S::one())).collect();
        lp.add_constraint(format!("cover_{}", t.id), row, Relation::Ge, S::one());
    }
    for (ti, t) in inst.terminals().iter().enumerate() {
        for (fi, f) in inst.facilities().iter().enumerate() {
            for p in &t.demand {
                let pi = packets.binary_search(p).expect("demand within universe");
                lp.add_constraint(
                    format!("link_{}_{}_{}", t.id, f.id, p),
                    vec![(y_var[fi][pi], S::one()), (x_var[ti][fi], -S::one())],
                    Relation::Ge,
                    S::zero(),
                );
            }
        }
    }
    RaflLp { lp, x_var, y_var, packets }
}

/// LP values arranged by terminal, facility and packet positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalSolution<S> {
    /// `x[t][f]`.
    pub x: Vec<Vec<S>>,
    /// `y[f][p]`, packets in universe order.
    pub y: Vec<Vec<S>>,
    pub objective: S,
}

impl<S: Scalar> FractionalSolution<S> {
    /// `sum_f sum_p lambda_f w_p y[f][p]`.
    pub fn facility_cost(&self, inst: &RaflInstance<S>) -> S {
        let weights: Vec<S> = inst.universe().iter().map(|(_, w)| S::from_weight(w)).collect();
        inst.facilities().iter().zip(&self.y).fold(S::zero(), |acc, (f, row)| {
            let produced = row.iter().zip(&weights).fold(S::zero(), |a, (y, w)| a + y.clone() * w.clone());
            acc + f.lambda.clone() * produced
        })
    }

    /// `sum_t w(D(t)) sum_f x[t][f] c(t,f)`.
    pub fn routing_cost(&self, inst: &RaflInstance<S>) -> S {
        self.x.iter().enumerate().fold(S::zero(), |acc, (ti, row)| {
            let avg = row.iter().enumerate().fold(S::zero(), |a, (fi, x)| a + x.clone() * inst.distance(ti, fi).clone());
            acc + S::from_weight(inst.demand_weight(ti)) * avg
        })
    }

    /// Coverage and linking rows hold up to the scalar's tolerance.
    pub fn is_feasible(&self, inst: &RaflInstance<S>) -> bool {
        let packets: Vec<PacketId> = inst.universe().ids().collect();
        inst.terminals().iter().enumerate().all(|(ti, t)| {
            let total = self.x[ti].iter().fold(S::zero(), |a, v| a + v.clone());
            S::one().le_tol(&total)
                && self.x[ti]
                    .iter()
                    .enumerate()
                    .all(|(fi, x)| t.demand.iter().all(|p| x.le_tol(&self.y[fi][packets.binary_search(p).expect("known packet")])))
        })
    }
}

/// Builds and solves the relaxation, then scales each terminal's assignment
/// row down to sum exactly to one (never raising the objective).
pub fn solve_rafl_lp<S: Scalar>(inst: &RaflInstance<S>) -> Result<FractionalSolution<S>> {
    let built = build_rafl_lp(inst);
    let sol = solve_lp(&built.lp);
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(sol.status));
    }
    let value = |v: usize| S::max_of(sol.values[v].clone(), S::zero());
    let mut x: Vec<Vec<S>> = built.x_var.iter().map(|row| row.iter().map(|&v| value(v)).collect()).collect();
    for row in x.iter_mut() {
        let total = row.iter().fold(S::zero(), |a, v| a + v.clone());
        if total > S::one() {
            for v in row.iter_mut() {
                *v = v.clone() / total.clone();
            }
        }
    }
    let y = built.y_var.iter().map(|row| row.iter().map(|&v| value(v)).collect()).collect();
    let mut out = FractionalSolution { x, y, objective: S::zero() };
    out.objective = out.facility_cost(inst) + out.routing_cost(inst);
    Ok(out)
}

/// Average routing and opening cost of each terminal under `sol`:
/// `C_r(t) = sum_f x[t][f] c(t,f)` and `C_f(t) = sum_f x[t][f] lambda_f`.
pub fn per_terminal_averages<S: Scalar>(sol: &FractionalSolution<S>, inst: &RaflInstance<S>) -> Vec<(S, S)> {
    sol.x
        .iter()
        .enumerate()
        .map(|(ti, row)| {
            row.iter().enumerate().fold((S::zero(), S::zero()), |(r, f), (fi, x)| {
                (r + x.clone() * inst.distance(ti, fi).clone(), f + x.clone() * inst.facilities()[fi].lambda.clone())
            })
        })
        .collect()
}
