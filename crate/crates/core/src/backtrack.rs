//! Minimality check by depth-first search over partial permutations.
//!
//! Cells are consumed in row-major order. At cell `c = (i,j)` the search
//! first fixes `π(i)` and `π(j)` (each fix extends to the whole diagonal
//! cycle), then the preimages of `S = P_{π(c)}`, which must all lie at or
//! below `m = min P_c` for `π(P)_c ⊴ P_c` to stay possible. Once they are
//! fixed, `max π⁻¹(S) < m` is a witness, equality with both cells defined
//! moves on to the next cell, and equality at an undefined cell yields a
//! propagation.

use crate::cycleset::{Cell, Domain, PartialCycleSet};
use crate::error::{Error, Result};
use crate::mincheck::{Elimination, MinCheckOutcome};
use crate::symmetry::{Diagonal, PartialPermutation};

/// Limits a partial check to `max_nodes` refinement steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

/// Runs the search for one diagonal and keeps node counters.
#[derive(Debug, Clone)]
pub struct BacktrackChecker {
    diagonal: Diagonal,
    start: PartialPermutation,
    cells: Vec<Cell>,
    nodes_total: u64,
}

struct Exhausted;

enum Found {
    Witness(PartialPermutation, Cell),
    Propagate(PartialPermutation, Cell, Elimination),
}

struct Search<'a> {
    p: &'a PartialCycleSet,
    t: &'a Diagonal,
    cells: &'a [Cell],
    complete: bool,
    nodes: u64,
    max_nodes: Option<u64>,
}

type Step = std::result::Result<Option<Found>, Exhausted>;

impl Search<'_> {
    fn refine(
        &mut self,
        pp: &PartialPermutation,
        x: usize,
        y: usize,
    ) -> std::result::Result<Option<PartialPermutation>, Exhausted> {
        self.nodes += 1;
        if self.max_nodes.is_some_and(|max| self.nodes > max) {
            return Err(Exhausted);
        }
        Ok(pp.propagate_cycle(self.t, x, y).ok())
    }

    fn step(&mut self, pp: PartialPermutation, mut idx: usize) -> Step {
        loop {
            let Some(&c) = self.cells.get(idx) else {
                return Ok(None);
            };
            for x in [c.row, c.col] {
                if !pp.is_fixed(x) {
                    for y in pp.candidates(x).iter() {
                        if let Some(next) = self.refine(&pp, x, y)? {
                            if let Some(found) = self.step(next, idx)? {
                                return Ok(Some(found));
                            }
                        }
                    }
                    return Ok(None);
                }
            }
            let image_cell = Cell::new(pp.image(c.row).unwrap(), pp.image(c.col).unwrap());
            let s = self.p.get(image_cell);
            let pc = self.p.get(c);
            let m = pc.min().expect("domains are non-empty");
            let allowed = Domain::full(m + 1);

            let mut open = None;
            let mut max_pre = 0;
            for y in s.iter() {
                let pre = pp.preimage_candidates(y);
                if pre.intersect(allowed).is_empty() {
                    return Ok(None);
                }
                match pre.value() {
                    Some(x) => max_pre = max_pre.max(x),
                    None => {
                        if open.is_none() {
                            open = Some((y, pre.intersect(allowed)));
                        }
                    }
                }
            }
            if let Some((y, pre)) = open {
                for x in pre.iter() {
                    if let Some(next) = self.refine(&pp, x, y)? {
                        if let Some(found) = self.step(next, idx)? {
                            return Ok(Some(found));
                        }
                    }
                }
                return Ok(None);
            }

            if max_pre < m {
                return Ok(Some(Found::Witness(pp, c)));
            }
            if s.is_singleton() && pc.is_singleton() {
                idx += 1;
                continue;
            }
            debug_assert!(!self.complete);
            let eliminate = if pc.len() >= 2 {
                Elimination {
                    cell: c,
                    value: pc.max().unwrap(),
                }
            } else {
                let at_m = s.iter().find(|&y| pp.preimage(y) == Some(m)).unwrap();
                Elimination {
                    cell: image_cell,
                    value: s.without(at_m).max().unwrap(),
                }
            };
            return Ok(Some(Found::Propagate(pp, c, eliminate)));
        }
    }
}

impl BacktrackChecker {
    pub fn new(diagonal: &Diagonal) -> BacktrackChecker {
        let n = diagonal.n();
        BacktrackChecker {
            diagonal: diagonal.clone(),
            start: PartialPermutation::from_diagonal(diagonal),
            cells: Cell::off_diagonal(n).collect(),
            nodes_total: 0,
        }
    }

    pub fn diagonal(&self) -> &Diagonal {
        &self.diagonal
    }

    /// Refinement steps over all checks so far.
    pub fn nodes_total(&self) -> u64 {
        self.nodes_total
    }

    /// Looks for a permutation commuting with the diagonal that lowers `p`.
    ///
    /// With `complete` set, `p` must be fully defined and the search always
    /// runs to the end; a budget is then an error.
    pub fn check(
        &mut self,
        p: &PartialCycleSet,
        budget: Option<SearchBudget>,
        complete: bool,
    ) -> Result<MinCheckOutcome> {
        if complete && budget.is_some() {
            return Err(Error::BudgetOnCompleteCheck);
        }
        let n = self.diagonal.n();
        if p.n() != n {
            return Err(Error::ShapeMismatch(format!(
                "size {} against diagonal of size {n}",
                p.n()
            )));
        }
        if complete && !p.is_complete() {
            return Err(Error::ShapeMismatch("complete check on an undefined cell".into()));
        }
        for i in 0..n {
            if p.get(Cell::new(i, i)) != Domain::single(self.diagonal.successor(i)) {
                return Err(Error::ShapeMismatch(format!(
                    "diagonal cell {} disagrees",
                    Cell::new(i, i)
                )));
            }
        }
        let mut search = Search {
            p,
            t: &self.diagonal,
            cells: &self.cells,
            complete,
            nodes: 0,
            max_nodes: budget.map(|b| b.max_nodes),
        };
        let result = search.step(self.start.clone(), 0);
        self.nodes_total += search.nodes;
        let complete_pi = |pp: &PartialPermutation| {
            pp.complete_in_centralizer(&self.diagonal)
                .expect("whole cycles are always completable")
        };
        Ok(match result {
            Err(Exhausted) => MinCheckOutcome::Unknown,
            Ok(None) => MinCheckOutcome::Minimal,
            Ok(Some(Found::Witness(pp, cell))) => MinCheckOutcome::Witness {
                pi: complete_pi(&pp),
                cell,
            },
            Ok(Some(Found::Propagate(pp, cell, eliminate))) => MinCheckOutcome::Propagate {
                pi: complete_pi(&pp),
                cell,
                eliminate,
            },
        })
    }
}
