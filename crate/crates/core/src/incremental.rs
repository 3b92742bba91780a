//! Minimality check through a second, persistent SAT instance.
//!
//! The instance encodes "some permutation `π` commuting with the diagonal
//! maps the matrix `M` (variables `w`) to `M' = π(M)` (variables `w'`) with
//! `M'` below `M`". Each check fixes `w` through assumptions; learned
//! clauses survive between checks.
//!
//! The complete kind compares `M'` and `M` lexicographically as bit strings
//! over positions (cells row-major, values descending), which for one-hot
//! rows is the matrix order. The partial kind reads `w_{c,k}` as
//! `k ∈ M_c` and encodes `M' ⊲ M` with bound indicators
//! `g_{c,k} ⇔ min M_c > k` and `l_{c,k} ⇔ max M'_c < k` and a chain
//! `n'_c` meaning "all cells before `c` satisfy ⊴ and no strict cell has
//! been chosen yet".

use std::io::{self, Write};

use cyclesat_engine::{LBool, Lit, SolveResult, Solver, SolverConfig, Var};

use crate::cycleset::{apply_permutation, strictly_below, Cell, Domain, PartialCycleSet, Permutation};
use crate::encoding::{exactly_one, Cnf, EoMethod, VarAlloc};
use crate::error::{Error, Result};
use crate::mincheck::MinCheckOutcome;
use crate::symmetry::Diagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleKind {
    Complete,
    Partial,
}

/// Variable layout of an oracle encoding.
#[derive(Debug, Clone)]
struct Layout {
    n: usize,
    w: Vec<Option<Var>>,
    w_image: Vec<Option<Var>>,
    p: Vec<Option<Var>>,
}

impl Layout {
    fn w(&self, c: Cell, k: usize) -> Option<Var> {
        self.w[c.index(self.n) * self.n + k]
    }

    fn w_image(&self, c: Cell, k: usize) -> Option<Var> {
        self.w_image[c.index(self.n) * self.n + k]
    }

    fn p(&self, i: usize, j: usize) -> Option<Var> {
        self.p[i * self.n + j]
    }
}

fn build_cnf(kind: OracleKind, t: &Diagonal, method: EoMethod) -> (Cnf, Layout) {
    let n = t.n();
    let mut alloc = VarAlloc::default();
    let mut w = vec![None; n * n * n];
    let mut w_image = vec![None; n * n * n];
    for layer in [&mut w, &mut w_image] {
        for c in Cell::off_diagonal(n) {
            for k in 0..n {
                if k != t.successor(c.row) {
                    layer[c.index(n) * n + k] = Some(alloc.fresh());
                }
            }
        }
    }
    let mut p = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            if t.cycle_len(i) == t.cycle_len(j) {
                p[i * n + j] = Some(alloc.fresh());
            }
        }
    }
    let layout = Layout { n, w, w_image, p };
    let mut clauses: Vec<Vec<Lit>> = Vec::new();

    // π is a permutation commuting with the diagonal
    for i in 0..n {
        let row: Vec<Lit> = (0..n).filter_map(|j| layout.p(i, j)).map(Var::pos).collect();
        clauses.extend(exactly_one(&row, method, &mut alloc));
        let col: Vec<Lit> = (0..n).filter_map(|j| layout.p(j, i)).map(Var::pos).collect();
        clauses.extend(exactly_one(&col, method, &mut alloc));
    }
    for i in 0..n {
        for j in 0..n {
            if let Some(v) = layout.p(i, j) {
                let next = layout.p(t.successor(i), t.successor(j)).expect("same cycle length");
                clauses.push(vec![v.neg(), next.pos()]);
            }
        }
    }

    // M' = π(M): M'_{i,j} = k iff M_{π(i),π(j)} = π(k)
    for c in Cell::off_diagonal(n) {
        for c2 in Cell::off_diagonal(n) {
            let (Some(pi), Some(pj)) = (layout.p(c.row, c2.row), layout.p(c.col, c2.col)) else {
                continue;
            };
            for k in 0..n {
                for k2 in 0..n {
                    let Some(pk) = layout.p(k, k2) else { continue };
                    let (Some(img), Some(orig)) = (layout.w_image(c, k), layout.w(c2, k2)) else {
                        continue;
                    };
                    let guard = [pi.neg(), pj.neg(), pk.neg()];
                    let mut forward = guard.to_vec();
                    forward.extend([orig.neg(), img.pos()]);
                    let mut backward = guard.to_vec();
                    backward.extend([orig.pos(), img.neg()]);
                    clauses.push(forward);
                    clauses.push(backward);
                }
            }
        }
    }

    match kind {
        OracleKind::Complete => complete_order(&layout, t, method, &mut alloc, &mut clauses),
        OracleKind::Partial => partial_order(&layout, &mut alloc, &mut clauses),
    }

    (
        Cnf {
            num_vars: alloc.count(),
            clauses,
        },
        layout,
    )
}

fn complete_order(layout: &Layout, t: &Diagonal, method: EoMethod, alloc: &mut VarAlloc, clauses: &mut Vec<Vec<Lit>>) {
    let n = layout.n;
    // redundant one-hot constraints on both matrices
    for get in [Layout::w, Layout::w_image] {
        for c in Cell::off_diagonal(n) {
            let lits: Vec<Lit> = (0..n).filter_map(|k| get(layout, c, k)).map(Var::pos).collect();
            clauses.extend(exactly_one(&lits, method, alloc));
        }
        for i in 0..n {
            for k in 0..n {
                if k == t.successor(i) {
                    continue;
                }
                let lits: Vec<Lit> = (0..n)
                    .filter_map(|j| get(layout, Cell::new(i, j), k))
                    .map(Var::pos)
                    .collect();
                clauses.extend(exactly_one(&lits, method, alloc));
            }
        }
    }

    // strict lexicographic order w' < w
    let positions: Vec<(Var, Var)> = Cell::off_diagonal(n)
        .flat_map(|c| (0..n).rev().map(move |k| (c, k)))
        .filter_map(|(c, k)| Some((layout.w_image(c, k)?, layout.w(c, k)?)))
        .collect();
    let eq: Vec<Var> = positions.iter().map(|_| alloc.fresh()).collect();
    clauses.push(vec![eq[0].pos()]);
    let last = positions.len() - 1;
    for (t, &(x, y)) in positions.iter().enumerate() {
        clauses.push(vec![eq[t].neg(), x.neg(), y.pos()]);
        if t < last {
            clauses.push(vec![eq[t].neg(), x.neg(), eq[t + 1].pos()]);
            clauses.push(vec![eq[t].neg(), y.pos(), eq[t + 1].pos()]);
        } else {
            clauses.push(vec![eq[t].neg(), x.neg()]);
            clauses.push(vec![eq[t].neg(), y.pos()]);
        }
    }
}

fn partial_order(layout: &Layout, alloc: &mut VarAlloc, clauses: &mut Vec<Vec<Lit>>) {
    let n = layout.n;
    let cells: Vec<Cell> = Cell::off_diagonal(n).collect();
    // g[c][k]: min M_c > k;  l[c][k]: max M'_c < k
    let mut g: Vec<Vec<Var>> = Vec::new();
    let mut l: Vec<Vec<Var>> = Vec::new();
    for &c in &cells {
        let gs: Vec<Var> = (0..n).map(|_| alloc.fresh()).collect();
        for k in 0..n {
            let w = layout.w(c, k);
            if let Some(w) = w {
                clauses.push(vec![gs[k].neg(), w.neg()]);
            }
            let mut def = vec![gs[k].pos()];
            if let Some(w) = w {
                def.push(w.pos());
            }
            if k > 0 {
                clauses.push(vec![gs[k].neg(), gs[k - 1].pos()]);
                def.push(gs[k - 1].neg());
            }
            clauses.push(def);
        }
        let ls: Vec<Var> = (0..n).map(|_| alloc.fresh()).collect();
        for k in (0..n).rev() {
            let w = layout.w_image(c, k);
            if let Some(w) = w {
                clauses.push(vec![ls[k].neg(), w.neg()]);
            }
            let mut def = vec![ls[k].pos()];
            if let Some(w) = w {
                def.push(w.pos());
            }
            if k + 1 < n {
                clauses.push(vec![ls[k].neg(), ls[k + 1].pos()]);
                def.push(ls[k + 1].neg());
            }
            clauses.push(def);
        }
        g.push(gs);
        l.push(ls);
    }

    let chain: Vec<Var> = cells.iter().map(|_| alloc.fresh()).collect();
    clauses.push(vec![chain[0].pos()]);
    for (q, &c) in cells.iter().enumerate() {
        // still searching: M'_c ⊴ M_c, i.e. every k in M'_c has min M_c ≥ k
        for k in 1..n {
            if let Some(w) = layout.w_image(c, k) {
                clauses.push(vec![chain[q].neg(), w.neg(), g[q][k - 1].pos()]);
            }
        }
        // either the next cell continues the search or c is strict
        let mut step = vec![chain[q].neg()];
        if q + 1 < cells.len() {
            step.push(chain[q + 1].pos());
        }
        for k in 1..n {
            let s = alloc.fresh();
            clauses.push(vec![s.neg(), l[q][k].pos()]);
            clauses.push(vec![s.neg(), g[q][k - 1].pos()]);
            step.push(s.pos());
        }
        clauses.push(step);
    }
}

/// A persistent minimality oracle for one diagonal.
pub struct OracleInstance {
    kind: OracleKind,
    diagonal: Diagonal,
    layout: Layout,
    solver: Solver,
    num_vars: usize,
    num_clauses: usize,
}

impl OracleInstance {
    pub fn build(kind: OracleKind, diagonal: &Diagonal) -> OracleInstance {
        OracleInstance::build_with(kind, diagonal, EoMethod::Binary, 0)
    }

    pub fn build_with(kind: OracleKind, diagonal: &Diagonal, method: EoMethod, seed: u64) -> OracleInstance {
        let (cnf, layout) = build_cnf(kind, diagonal, method);
        let mut solver = Solver::new(SolverConfig {
            seed,
            ..SolverConfig::default()
        });
        solver.ensure_vars(cnf.num_vars);
        for c in &cnf.clauses {
            solver.add_clause(c);
        }
        OracleInstance {
            kind,
            diagonal: diagonal.clone(),
            layout,
            solver,
            num_vars: cnf.num_vars,
            num_clauses: cnf.clauses.len(),
        }
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn diagonal(&self) -> &Diagonal {
        &self.diagonal
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.num_clauses
    }

    pub fn solver_stats(&self) -> &cyclesat_engine::SolverStats {
        self.solver.stats()
    }

    /// Fixes the `w` layer to `p`.
    pub fn assumptions_for(&self, p: &PartialCycleSet) -> Result<Vec<Lit>> {
        let n = self.layout.n;
        if p.n() != n {
            return Err(Error::ShapeMismatch(format!(
                "size {} against instance of size {n}",
                p.n()
            )));
        }
        if self.kind == OracleKind::Complete && !p.is_complete() {
            return Err(Error::ShapeMismatch("complete instance needs a complete matrix".into()));
        }
        let mut out = Vec::new();
        for c in Cell::all(n) {
            let d = p.get(c);
            let fixed = self.diagonal.successor(c.row);
            if c.is_diagonal() {
                if d != Domain::single(fixed) {
                    return Err(Error::ShapeMismatch(format!("diagonal cell {c} disagrees")));
                }
                continue;
            }
            if d.contains(fixed) {
                return Err(Error::ShapeMismatch(format!(
                    "cell {c} allows the diagonal value of its row"
                )));
            }
            for k in 0..n {
                if let Some(v) = self.layout.w(c, k) {
                    out.push(Lit::new(v, d.contains(k)));
                }
            }
        }
        Ok(out)
    }

    /// Searches for a witness; `budget` limits conflicts of partial checks.
    pub fn check(&mut self, p: &PartialCycleSet, budget: Option<u64>) -> Result<MinCheckOutcome> {
        if self.kind == OracleKind::Complete && budget.is_some() {
            return Err(Error::BudgetOnCompleteCheck);
        }
        let assumptions = self.assumptions_for(p)?;
        match self.solver.solve_limited(&assumptions, budget) {
            SolveResult::Sat => {
                let pi = self.decode_permutation();
                let cell = strictly_below(&apply_permutation(&pi, p), p).expect("oracle models are witnesses");
                Ok(MinCheckOutcome::Witness { pi, cell })
            }
            SolveResult::Unsat { .. } => Ok(MinCheckOutcome::Minimal),
            SolveResult::Unknown => Ok(MinCheckOutcome::Unknown),
        }
    }

    fn decode_permutation(&self) -> Permutation {
        let n = self.layout.n;
        let images = (0..n)
            .map(|i| {
                (0..n)
                    .find(|&j| {
                        self.layout
                            .p(i, j)
                            .is_some_and(|v| self.solver.model_value(v.pos()) == LBool::True)
                    })
                    .expect("p rows are one-hot")
            })
            .collect();
        Permutation::from_images(images).expect("p is a permutation")
    }
}

/// Writes the oracle encoding in DIMACS format.
pub fn write_oracle_dimacs<W: Write>(kind: OracleKind, diagonal: &Diagonal, method: EoMethod, w: W) -> io::Result<()> {
    build_cnf(kind, diagonal, method).0.write_dimacs(w)
}
