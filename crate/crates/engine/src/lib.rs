//! A small CDCL SAT solver with assumptions, model enumeration and hooks for
//! external propagators.

mod heap;
mod solver;
mod types;

pub use solver::{
    EnumerationEnd, ExternalPropagator, NoPropagator, SolveResult, Solver, SolverConfig, SolverError, SolverStats,
};
pub use types::{Assignment, LBool, Lit, Var};
