//! Files, generators and the command line front end.

pub mod cli;
mod convert;
pub mod format;
pub mod generate;

pub use convert::{convert_rafl, convert_rand, to_f64_rafl, to_f64_rand};
pub use format::{
    parse_instance, parse_solution, write_rafl, write_rafl_solution, write_rand, write_rand_solution, Instance, Problem, Solution,
};
pub use generate::{generate, generate_rafl, generate_rand, laminar_family, GeneratorConfig};
