use std::fmt::Write as _;

use serde::Serialize;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub name: String,
    /// Sparse row: `(variable, coefficient)`.
    pub coeffs: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

/// `minimize c.x subject to rows, x >= 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram<S> {
    pub names: Vec<String>,
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new() -> Self {
        Self { names: Vec::new(), objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_variable(&mut self, name: impl Into<String>, cost: S) -> usize {
        self.names.push(name.into());
        self.objective.push(cost);
        self.names.len() - 1
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, coeffs: Vec<(usize, S)>, relation: Relation, rhs: S) {
        debug_assert!(coeffs.iter().all(|(v, _)| *v < self.names.len()));
        self.constraints.push(Constraint { name: name.into(), coeffs, relation, rhs });
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn objective_value(&self, values: &[S]) -> S {
        self.objective.iter().zip(values).fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone())
    }

    /// Largest violation of any row or bound at `values` (zero when feasible).
    pub fn max_violation(&self, values: &[S]) -> S {
        let mut worst = S::zero();
        for v in values {
            worst = S::max_of(worst, -v.clone());
        }
        for c in &self.constraints {
            let lhs = c.coeffs.iter().fold(S::zero(), |acc, (j, a)| acc + a.clone() * values[*j].clone());
            let gap = match c.relation {
                Relation::Le => lhs - c.rhs.clone(),
                Relation::Ge => c.rhs.clone() - lhs,
                Relation::Eq => (lhs - c.rhs.clone()).abs(),
            };
            worst = S::max_of(worst, gap);
        }
        worst
    }

    /// CPLEX LP text for cross-checking with external solvers. Coefficients are
    /// written as decimals, so exact values may be rounded.
    pub fn to_lp_format(&self) -> String {
        fn term<S: Scalar>(out: &mut String, first: &mut bool, coef: &S, name: &str) {
            let value = coef.approx_f64();
            if *first {
                let _ = write!(out, " {value} {name}");
            } else if value < 0.0 {
                let _ = write!(out, " - {} {name}", -value);
            } else {
                let _ = write!(out, " + {value} {name}");
            }
            *first = false;
        }
        let mut out = String::from("Minimize\n obj:");
        let mut first = true;
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                term(&mut out, &mut first, c, &self.names[j]);
            }
        }
        if first {
            out.push_str(" 0");
        }
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            let mut first = true;
            for (j, a) in &c.coeffs {
                term(&mut out, &mut first, a, &self.names[*j]);
            }
            if first {
                out.push_str(" 0");
            }
            let _ = writeln!(out, " {} {}", c.relation.symbol(), c.rhs.approx_f64());
        }
        out.push_str("End\n");
        out
    }
}
