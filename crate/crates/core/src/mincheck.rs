//! Results shared by the two minimality checks.

use crate::cycleset::{Cell, Permutation};

/// The literal `¬v_{cell,value}`: cell `cell` cannot take `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Elimination {
    pub cell: Cell,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinCheckOutcome {
    /// No diagonal-preserving permutation lowers the matrix.
    Minimal,
    /// `π(P)` is strictly below `P`, first at `cell`.
    Witness { pi: Permutation, cell: Cell },
    /// `π(P) ⊴ P` up to `cell`, and asserting the opposite of `eliminate`
    /// would make `π` a witness there.
    Propagate {
        pi: Permutation,
        cell: Cell,
        eliminate: Elimination,
    },
    /// The search budget ran out.
    Unknown,
}

impl MinCheckOutcome {
    pub fn is_minimal(&self) -> bool {
        matches!(self, MinCheckOutcome::Minimal)
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, MinCheckOutcome::Witness { .. })
    }
}
