//! Clauses learned from minimality-check results.
//!
//! A breaking clause for a witness `π` strictly below at cell `c` says that
//! one of the bounds that made `π` a witness must change. For every
//! off-diagonal cell `d ≤ c` with `t = min P_d`:
//!
//! - image side: `v_{π(d),π(x)}` for `x > t` (for `x ≥ t` at `d = c`),
//! - matrix side: `v_{d,x}` for `x < t`.
//!
//! Any complete matrix falsifying the clause satisfies `π(C)_d ≤ C_d` on all
//! earlier cells and `π(C)_c < C_c`, so `π(C) <lex C`. Diagonal cells are
//! skipped: a diagonal-preserving `π` leaves them unchanged.

use cyclesat_engine::Lit;

use crate::cycleset::{apply_permutation, strictly_below, Cell, CycleSet, PartialCycleSet, Permutation};
use crate::encoding::{Indicator, VarMap};
use crate::error::{Error, Result};
use crate::mincheck::Elimination;

fn push_indicator(varmap: &VarMap, cell: Cell, value: usize, out: &mut Vec<Lit>) {
    if let Indicator::Lit(l) = varmap.indicator(cell, value) {
        if !out.contains(&l) {
            out.push(l);
        }
    }
}

/// Image-side literals of cell `d`: `v_{π(d),π(x)}` for `x ≥ from`.
fn image_side(varmap: &VarMap, pi: &Permutation, d: Cell, from: usize, out: &mut Vec<Lit>) {
    let target = Cell::new(pi.apply(d.row), pi.apply(d.col));
    for x in from..varmap.n() {
        push_indicator(varmap, target, pi.apply(x), out);
    }
}

/// Matrix-side literals of cell `d`: `v_{d,x}` for `x < below`.
fn matrix_side(varmap: &VarMap, d: Cell, below: usize, out: &mut Vec<Lit>) {
    for x in 0..below {
        push_indicator(varmap, d, x, out);
    }
}

fn earlier_cells(p: &PartialCycleSet, pi: &Permutation, c: Cell, varmap: &VarMap, out: &mut Vec<Lit>) {
    let n = p.n();
    for idx in 0..c.index(n) {
        let d = Cell::from_index(idx, n);
        if d.is_diagonal() {
            continue;
        }
        let t = p.get(d).min().expect("domains are non-empty");
        image_side(varmap, pi, d, t + 1, out);
        matrix_side(varmap, d, t, out);
    }
}

/// The clause excluding every extension of `p` that `π` lowers at or before
/// `c`.
pub fn breaking_clause(p: &PartialCycleSet, pi: &Permutation, c: Cell, varmap: &VarMap) -> Result<Vec<Lit>> {
    if strictly_below(&apply_permutation(pi, p), p) != Some(c) {
        return Err(Error::NotAWitness);
    }
    let mut out = Vec::new();
    earlier_cells(p, pi, c, varmap, &mut out);
    let t = p.get(c).min().expect("domains are non-empty");
    image_side(varmap, pi, c, t, &mut out);
    matrix_side(varmap, c, t, &mut out);
    Ok(out)
}

/// The reason clause for propagating `eliminate`, which must be unit under
/// `p` with `¬v_{eliminate}` as its open literal.
///
/// With `m = min P_c = max π(P)_c` there are two shapes:
/// - `eliminate` is in cell `c`: if cell `c` took that value, `π(P)_c`
///   would lie strictly below it;
/// - `eliminate` is in cell `π(c)`: if that cell took the value, `π(P)_c`
///   would lie strictly below `m`.
pub fn propagation_clause(
    p: &PartialCycleSet,
    pi: &Permutation,
    c: Cell,
    eliminate: Elimination,
    varmap: &VarMap,
) -> Result<Vec<Lit>> {
    let image_cell = Cell::new(pi.apply(c.row), pi.apply(c.col));
    let target = p.get(eliminate.cell);
    if c.is_diagonal() || target.len() < 2 || !target.contains(eliminate.value) {
        return Err(Error::NotPropagating);
    }
    let Indicator::Lit(open) = varmap.indicator(eliminate.cell, eliminate.value) else {
        return Err(Error::NotPropagating);
    };
    let mut out = Vec::new();
    earlier_cells(p, pi, c, varmap, &mut out);
    if eliminate.cell == c {
        image_side(varmap, pi, c, eliminate.value, &mut out);
    } else if eliminate.cell == image_cell {
        let pre = pi.inverse().apply(eliminate.value);
        matrix_side(varmap, c, pre + 1, &mut out);
    } else {
        return Err(Error::NotPropagating);
    }
    if out.contains(&open) {
        return Err(Error::NotPropagating);
    }
    // every other literal must already be false under p
    for &l in &out {
        let (cell, value) = varmap.matrix_info(l.var()).expect("matrix literal");
        if p.get(cell).contains(value) {
            return Err(Error::NotPropagating);
        }
    }
    out.push(!open);
    Ok(out)
}

/// Shortens a clause using the ExactlyOne groups of cells and of row
/// values:
///
/// - if the clause holds every member of a group except `s`, those members
///   are replaced by `¬s`;
/// - if the clause holds `¬s`, other positive members of the groups of `s`
///   are dropped.
pub fn optimize_clause(clause: &[Lit], varmap: &VarMap) -> Vec<Lit> {
    let mut lits: Vec<Lit> = clause.to_vec();
    lits.sort_unstable();
    lits.dedup();
    let n = varmap.n();
    loop {
        let mut changed = false;

        let negatives: Vec<Lit> = lits.iter().copied().filter(|l| !l.is_positive()).collect();
        for neg in negatives {
            let Some((cell, value)) = varmap.matrix_info(neg.var()) else {
                continue;
            };
            let mut related = varmap.cell_group(cell);
            related.extend(varmap.row_value_group(cell.row, value));
            let before = lits.len();
            lits.retain(|l| !(l.is_positive() && l.var() != neg.var() && related.contains(&l.var())));
            changed |= lits.len() != before;
        }

        let groups = (0..n * n)
            .map(|i| Cell::from_index(i, n))
            .filter(|c| !c.is_diagonal())
            .map(|c| varmap.cell_group(c))
            .chain(
                (0..n)
                    .flat_map(|i| (0..n).map(move |k| (i, k)))
                    .map(|(i, k)| varmap.row_value_group(i, k)),
            );
        for group in groups {
            if group.len() < 2 {
                continue;
            }
            let missing: Vec<_> = group.iter().filter(|v| !lits.contains(&v.pos())).collect();
            if missing.len() == 1 && !lits.contains(&missing[0].neg()) {
                let s = *missing[0];
                lits.retain(|l| !(l.is_positive() && group.contains(&l.var())));
                lits.push(s.neg());
                lits.sort_unstable();
                changed = true;
            }
        }

        if !changed {
            return lits;
        }
    }
}

/// Excludes exactly the matrix `c`. The last off-diagonal cell of each row
/// is left out: the rest of the row determines it.
pub fn blocking_clause(c: &CycleSet, varmap: &VarMap) -> Vec<Lit> {
    let n = c.n();
    let mut out = Vec::new();
    for i in 0..n {
        let last = if i == n - 1 { n - 2 } else { n - 1 };
        for j in 0..n {
            if j == i || j == last {
                continue;
            }
            if let Indicator::Lit(l) = varmap.indicator(Cell::new(i, j), c.get(i, j)) {
                out.push(!l);
            }
        }
    }
    out
}
