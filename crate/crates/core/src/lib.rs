//! Isomorph-free enumeration of non-degenerate cycle sets (involutive
//! non-degenerate set-theoretic solutions of the Yang-Baxter equation).
//!
//! The search runs one SAT instance per conjugacy class of diagonals. A
//! minimality check attached to the solver rejects every assignment that
//! some diagonal-preserving permutation maps to a lexicographically smaller
//! matrix, so exactly one representative of each isomorphism class is
//! reported.

pub mod backtrack;
pub mod cycleset;
pub mod driver;
pub mod encoding;
pub mod error;
pub mod incremental;
pub mod learning;
pub mod mincheck;
pub mod oracle;
pub mod symmetry;

pub use cycleset::{
    apply_permutation, apply_to_cycle_set, below_upto, domain_leq, domain_lt, extensions, satisfies_axioms,
    strictly_below, Cell, CycleSet, Domain, PartialCycleSet, Permutation, MAX_N,
};
pub use encoding::{encode_axioms, exactly_one, Cnf, Encoding, EoMethod, Indicator, VarAlloc, VarMap};
pub use error::{Error, Result};
pub use symmetry::{fixes_diagonal, integer_partitions, Diagonal, PartialPermutation};

pub use backtrack::{BacktrackChecker, SearchBudget};
pub use driver::{enumerate_diagonal, run, Backend, DiagonalRun, DiagonalStats, RunConfig, RunError, RunOutput, Stats};
pub use incremental::{OracleInstance, OracleKind};
pub use mincheck::{Elimination, MinCheckOutcome};
pub use oracle::{brute_force_all, brute_force_diagonal, lex_min_reps, verify_database, Report, VerifyError};
