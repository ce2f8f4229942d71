use thiserror::Error;

use crate::lp::LpStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("infeasible path for terminal {terminal}: {reason}")]
    InfeasiblePath { terminal: u32, reason: String },

    #[error("terminal {0} has no path in the solution")]
    MissingPath(u32),

    #[error("terminal {0} is not assigned to a facility")]
    Unassigned(u32),

    #[error("unknown facility {0}")]
    UnknownFacility(u32),

    #[error("unknown terminal {0}")]
    UnknownTerminal(u32),

    #[error("nodes {0} and {1} are not connected")]
    Disconnected(usize, usize),

    #[error("demand sets of terminals {first} and {second} cross (neither disjoint nor nested)")]
    NotLaminar { first: u32, second: u32 },

    #[error("instance is not preprocessed: demand node of weight {child} sits under a parent of weight {parent}; run preprocess first")]
    NotPreprocessed { parent: u64, child: u64 },

    #[error("{what} needs {size} units of work, above the cap of {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("linear program ended with status {0:?}")]
    Lp(LpStatus),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
