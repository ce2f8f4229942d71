//! Linear programming: a small exact simplex and the facility location relaxation.

mod program;
mod rafl;
mod simplex;

pub use program::{Constraint, LinearProgram, Relation};
pub use rafl::{build_rafl_lp, per_terminal_averages, solve_rafl_lp, FractionalSolution, RaflLp};
pub use simplex::{solve_lp, LpSolution, LpStatus};
