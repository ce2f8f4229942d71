//! Approximation algorithms for network design and facility location when
//! routers can drop duplicate packets.
//!
//! * [`rand_solver`] routes every terminal to a single source so that an edge
//!   pays once per distinct packet it carries, within `O(log P)` of optimal.
//! * [`rafl_solver`] rounds an LP relaxation to assign terminals to facilities
//!   that pay once per distinct packet they produce, within a factor 27.
//! * [`oracle`] holds exhaustive solvers used to check those guarantees on
//!   small instances.
//!
//! All numeric code is generic over [`Scalar`]. [`Rational`] gives exact
//! arithmetic and is what the command line tool uses; `f64` is available for
//! speed.

pub mod error;
pub mod laminar;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod rafl_solver;
pub mod rand_solver;
pub mod scalar;
pub mod steiner;
pub mod toolkit;

#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub type RandInstanceQ = model::RandInstance<Rational>;
pub type RaflInstanceQ = model::RaflInstance<Rational>;
pub type WeightedGraphQ = model::WeightedGraph<Rational>;
pub type LinearProgramQ = lp::LinearProgram<Rational>;
pub type FractionalSolutionQ = lp::FractionalSolution<Rational>;

pub type RandInstanceF64 = model::RandInstance<f64>;
pub type RaflInstanceF64 = model::RaflInstance<f64>;
pub type WeightedGraphF64 = model::WeightedGraph<f64>;
pub type LinearProgramF64 = lp::LinearProgram<f64>;
pub type FractionalSolutionF64 = lp::FractionalSolution<f64>;
