//! CNF encoding of the cycle-set axioms with a fixed diagonal.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use cyclesat_engine::{Assignment, LBool, Lit, Var};

use crate::cycleset::{Cell, CycleSet, Domain, PartialCycleSet};
use crate::error::{Error, Result};
use crate::symmetry::Diagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EoMethod {
    #[default]
    Binary,
    Commander,
}

impl FromStr for EoMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "binary" => Ok(EoMethod::Binary),
            "commander" => Ok(EoMethod::Commander),
            _ => Err(format!("unknown ExactlyOne method {s:?}")),
        }
    }
}

impl fmt::Display for EoMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EoMethod::Binary => "binary",
            EoMethod::Commander => "commander",
        })
    }
}

/// Hands out fresh variables.
#[derive(Debug, Clone, Default)]
pub struct VarAlloc {
    next: u32,
}

impl VarAlloc {
    pub fn starting_at(next: u32) -> VarAlloc {
        VarAlloc { next }
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var(self.next);
        self.next += 1;
        v
    }

    pub fn count(&self) -> usize {
        self.next as usize
    }
}

const COMMANDER_GROUP: usize = 3;

/// Clauses forcing exactly one of `lits` to be true.
pub fn exactly_one(lits: &[Lit], method: EoMethod, alloc: &mut VarAlloc) -> Vec<Vec<Lit>> {
    let mut out = Vec::new();
    match lits.len() {
        0 => out.push(Vec::new()),
        1 => out.push(vec![lits[0]]),
        _ => match method {
            EoMethod::Binary => binary_eo(lits, alloc, &mut out),
            EoMethod::Commander => commander_eo(lits, alloc, &mut out),
        },
    }
    out
}

fn binary_eo(lits: &[Lit], alloc: &mut VarAlloc, out: &mut Vec<Vec<Lit>>) {
    out.push(lits.to_vec());
    let bits = usize::BITS - (lits.len() - 1).leading_zeros();
    let aux: Vec<Var> = (0..bits).map(|_| alloc.fresh()).collect();
    for (i, &l) in lits.iter().enumerate() {
        for (t, &b) in aux.iter().enumerate() {
            out.push(vec![!l, Lit::new(b, i >> t & 1 == 1)]);
        }
    }
}

fn pairwise_amo(lits: &[Lit], out: &mut Vec<Vec<Lit>>) {
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            out.push(vec![!lits[i], !lits[j]]);
        }
    }
}

fn commander_eo(lits: &[Lit], alloc: &mut VarAlloc, out: &mut Vec<Vec<Lit>>) {
    if lits.len() <= COMMANDER_GROUP {
        out.push(lits.to_vec());
        pairwise_amo(lits, out);
        return;
    }
    let mut commanders = Vec::new();
    for group in lits.chunks(COMMANDER_GROUP) {
        let c = alloc.fresh().pos();
        pairwise_amo(group, out);
        let mut alo = vec![!c];
        alo.extend_from_slice(group);
        out.push(alo);
        for &l in group {
            out.push(vec![!l, c]);
        }
        commanders.push(c);
    }
    commander_eo(&commanders, alloc, out);
}

/// A matrix indicator that is either a variable or a constant fixed by the
/// diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indicator {
    Lit(Lit),
    Const(bool),
}

/// Variable numbering of an encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    n: usize,
    diagonal: Diagonal,
    matrix: Vec<Option<Var>>,
    y: Vec<Option<Var>>,
    matrix_info: Vec<(Cell, usize)>,
    num_y: usize,
    num_vars: usize,
}

impl VarMap {
    fn new(diagonal: &Diagonal) -> VarMap {
        let n = diagonal.n();
        let mut next = 0u32;
        let mut matrix = vec![None; n * n * n];
        let mut matrix_info = Vec::new();
        for c in Cell::off_diagonal(n) {
            for k in 0..n {
                if k != diagonal.successor(c.row) {
                    matrix[c.index(n) * n + k] = Some(Var(next));
                    matrix_info.push((c, k));
                    next += 1;
                }
            }
        }
        let mut y = vec![None; n * n * n * n];
        let mut num_y = 0;
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    for b in 0..n {
                        y[((i * n + j) * n + k) * n + b] = Some(Var(next));
                        next += 1;
                        num_y += 1;
                    }
                }
            }
        }
        VarMap {
            n,
            diagonal: diagonal.clone(),
            matrix,
            y,
            matrix_info,
            num_y,
            num_vars: next as usize,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &Diagonal {
        &self.diagonal
    }

    /// Total variable count, auxiliaries included.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_matrix_vars(&self) -> usize {
        self.matrix_info.len()
    }

    pub fn num_y_vars(&self) -> usize {
        self.num_y
    }

    pub fn matrix_var(&self, c: Cell, k: usize) -> Option<Var> {
        self.matrix[c.index(self.n) * self.n + k]
    }

    pub fn y_var(&self, i: usize, j: usize, k: usize, b: usize) -> Option<Var> {
        let n = self.n;
        self.y[((i * n + j) * n + k) * n + b]
    }

    /// `[C_c = k]`, as a literal or a constant.
    pub fn indicator(&self, c: Cell, k: usize) -> Indicator {
        match self.matrix_var(c, k) {
            Some(v) => Indicator::Lit(v.pos()),
            None => Indicator::Const(c.is_diagonal() && k == self.diagonal.successor(c.row)),
        }
    }

    /// The cell and value of a matrix variable.
    pub fn matrix_info(&self, v: Var) -> Option<(Cell, usize)> {
        self.matrix_info.get(v.index()).copied()
    }

    pub fn is_matrix_var(&self, v: Var) -> bool {
        v.index() < self.matrix_info.len()
    }

    /// Matrix variables in cell order, values ascending.
    pub fn matrix_vars(&self) -> impl Iterator<Item = Var> {
        (0..self.matrix_info.len() as u32).map(Var)
    }

    /// The ExactlyOne group of a cell.
    pub fn cell_group(&self, c: Cell) -> Vec<Var> {
        (0..self.n).filter_map(|k| self.matrix_var(c, k)).collect()
    }

    /// The ExactlyOne group of value `k` in row `i`.
    pub fn row_value_group(&self, i: usize, k: usize) -> Vec<Var> {
        (0..self.n)
            .filter_map(|j| self.matrix_var(Cell::new(i, j), k))
            .collect()
    }

    /// Sidecar listing: `v i j k <index>` and `y i j k b <index>` lines,
    /// 1-based.
    pub fn write_sidecar<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (idx, (c, k)) in self.matrix_info.iter().enumerate() {
            writeln!(w, "v {} {} {} {}", c.row + 1, c.col + 1, k + 1, idx + 1)?;
        }
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    for b in 0..n {
                        if let Some(v) = self.y_var(i, j, k, b) {
                            writeln!(w, "y {} {} {} {} {}", i + 1, j + 1, k + 1, b + 1, v.to_dimacs())?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The partial cycle set left open by `assignment`: cell `c` keeps every
    /// value whose indicator is not false.
    pub fn extract_partial(&self, assignment: Assignment<'_>) -> Result<PartialCycleSet> {
        let n = self.n;
        let domains = Cell::all(n)
            .map(|c| {
                let mut d = Domain::EMPTY;
                for k in 0..n {
                    let open = match self.indicator(c, k) {
                        Indicator::Const(b) => b,
                        Indicator::Lit(l) => !assignment.lit_value(l).is_false(),
                    };
                    if open {
                        d.insert(k);
                    }
                }
                if d.is_empty() {
                    Err(Error::EmptyDomain(c))
                } else {
                    Ok(d)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        PartialCycleSet::new(n, domains)
    }

    /// Reads the matrix off a complete model.
    pub fn decode_model(&self, model: Assignment<'_>) -> Result<CycleSet> {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for c in Cell::all(n) {
            if c.is_diagonal() {
                entries[c.index(n)] = self.diagonal.successor(c.row);
                continue;
            }
            let mut value = None;
            for k in 0..n {
                if let Some(v) = self.matrix_var(c, k) {
                    if model.var_value(v) == LBool::True {
                        if value.is_some() {
                            return Err(Error::MalformedModel(c));
                        }
                        value = Some(k);
                    }
                }
            }
            entries[c.index(n)] = value.ok_or(Error::MalformedModel(c))?;
        }
        CycleSet::new(n, entries)
    }

    /// Model literals of the matrix variables of `c`.
    pub fn literals_of(&self, c: &CycleSet) -> Vec<Lit> {
        self.matrix_info
            .iter()
            .enumerate()
            .map(|(idx, &(cell, k))| Lit::new(Var(idx as u32), c.at(cell) == k))
            .collect()
    }
}

/// A clause list with its variable count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn write_dimacs<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                write!(w, "{} ", l.to_dimacs())?;
            }
            writeln!(w, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Encoding {
    pub cnf: Cnf,
    pub varmap: VarMap,
}

/// Encodes all cycle sets of size `n` whose diagonal is `t`.
pub fn encode_axioms(t: &Diagonal, method: EoMethod) -> Encoding {
    let n = t.n();
    let mut varmap = VarMap::new(t);
    let mut alloc = VarAlloc::starting_at(varmap.num_vars as u32);
    let mut clauses = Vec::new();

    for c in Cell::off_diagonal(n) {
        let lits: Vec<Lit> = varmap.cell_group(c).into_iter().map(Var::pos).collect();
        clauses.extend(exactly_one(&lits, method, &mut alloc));
    }
    for i in 0..n {
        for k in 0..n {
            if k == t.successor(i) {
                continue;
            }
            let lits: Vec<Lit> = varmap.row_value_group(i, k).into_iter().map(Var::pos).collect();
            clauses.extend(exactly_one(&lits, method, &mut alloc));
        }
    }

    // cycloid: C[C[i,j],C[i,k]] = b and C[C[j,i],C[j,k]] = b both imply y_{i,j,k,b}
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                for (a, other) in [(i, j), (j, i)] {
                    for x in 0..n {
                        for y in 0..n {
                            for b in 0..n {
                                let yv = varmap.y_var(i, j, k, b).unwrap();
                                let conds = [(Cell::new(a, other), x), (Cell::new(a, k), y), (Cell::new(x, y), b)];
                                if let Some(clause) = implication_clause(&varmap, &conds, yv.pos()) {
                                    clauses.push(clause);
                                }
                            }
                        }
                    }
                }
                let ys: Vec<Lit> = (0..n).map(|b| varmap.y_var(i, j, k, b).unwrap().pos()).collect();
                clauses.extend(exactly_one(&ys, method, &mut alloc));
            }
        }
    }

    varmap.num_vars = alloc.count();
    Encoding {
        cnf: Cnf {
            num_vars: varmap.num_vars,
            clauses,
        },
        varmap,
    }
}

/// `⋀ [C_cell = value] → head`, simplified against the constants. `None`
/// when the clause is satisfied outright.
fn implication_clause(varmap: &VarMap, conds: &[(Cell, usize)], head: Lit) -> Option<Vec<Lit>> {
    let mut clause = Vec::with_capacity(conds.len() + 1);
    for (idx, &(cell, value)) in conds.iter().enumerate() {
        for &(other_cell, other_value) in &conds[..idx] {
            if other_cell == cell && other_value != value {
                return None;
            }
        }
        match varmap.indicator(cell, value) {
            Indicator::Const(false) => return None,
            Indicator::Const(true) => {}
            Indicator::Lit(l) => {
                if !clause.contains(&!l) {
                    clause.push(!l);
                }
            }
        }
    }
    clause.push(head);
    Some(clause)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cyclesat_engine::{NoPropagator, Solver};

    /// Truth-table models of `clauses` projected onto the first `inputs`
    /// variables.
    fn projected_models(clauses: &[Vec<Lit>], num_vars: usize, inputs: usize) -> Vec<u32> {
        let mut out: Vec<u32> = (0..1u32 << num_vars)
            .filter(|bits| {
                clauses
                    .iter()
                    .all(|c| c.iter().any(|l| (bits >> l.var().index() & 1 == 1) == l.is_positive()))
            })
            .map(|bits| bits & ((1 << inputs) - 1))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn one_hot(m: usize) -> Vec<u32> {
        (0..m).map(|i| 1 << i).collect()
    }

    #[test]
    fn exactly_one_single_var_is_unit() {
        let mut alloc = VarAlloc::starting_at(1);
        assert_eq!(
            exactly_one(&[Var(0).pos()], EoMethod::Binary, &mut alloc),
            vec![vec![Var(0).pos()]]
        );
    }

    #[test]
    fn exactly_one_truth_tables() {
        for method in [EoMethod::Binary, EoMethod::Commander] {
            for m in 2..=7 {
                let lits: Vec<Lit> = (0..m as u32).map(|v| Var(v).pos()).collect();
                let mut alloc = VarAlloc::starting_at(m as u32);
                let clauses = exactly_one(&lits, method, &mut alloc);
                assert_eq!(
                    projected_models(&clauses, alloc.count(), m),
                    one_hot(m),
                    "{method} m={m}"
                );
                if method == EoMethod::Binary {
                    let bits = (usize::BITS - (m - 1).leading_zeros()) as usize;
                    assert_eq!(alloc.count() - m, bits);
                }
            }
        }
    }

    #[test]
    fn matrix_variable_count() {
        let enc = encode_axioms(&Diagonal::identity(3), EoMethod::Binary);
        assert_eq!(enc.varmap.num_matrix_vars(), 12);
    }

    fn solutions(t: &Diagonal, method: EoMethod) -> Vec<CycleSet> {
        let enc = encode_axioms(t, method);
        let mut s = Solver::default();
        s.ensure_vars(enc.cnf.num_vars);
        for c in &enc.cnf.clauses {
            s.add_clause(c);
        }
        let mut out = Vec::new();
        s.enumerate(&mut NoPropagator, |m| {
            let c = enc.varmap.decode_model(m).unwrap();
            let block = enc
                .varmap
                .literals_of(&c)
                .into_iter()
                .map(|l| !l)
                .filter(|l| !l.is_positive())
                .collect();
            out.push(c);
            Some(block)
        })
        .unwrap();
        out.sort();
        out
    }

    #[test]
    fn size_two_models() {
        let id = solutions(&Diagonal::identity(2), EoMethod::Binary);
        assert_eq!(id, vec![CycleSet::from_one_based(&[&[1, 2], &[1, 2]]).unwrap()]);
        let swap = solutions(&Diagonal::parse(2, "(1 2)").unwrap(), EoMethod::Binary);
        assert_eq!(swap, vec![CycleSet::from_one_based(&[&[2, 1], &[2, 1]]).unwrap()]);
    }

    #[test]
    fn both_methods_agree() {
        for t in Diagonal::representatives(3).unwrap() {
            assert_eq!(solutions(&t, EoMethod::Binary), solutions(&t, EoMethod::Commander));
        }
    }

    #[test]
    fn decode_rejects_double_indicator() {
        // variables 0 and 1 are values 2 and 3 of cell (1,2)
        let enc3 = encode_axioms(&Diagonal::identity(3), EoMethod::Binary);
        let mut vals = vec![LBool::False; enc3.cnf.num_vars];
        vals[0] = LBool::True;
        vals[1] = LBool::True;
        assert_eq!(
            enc3.varmap.decode_model(Assignment::new(&vals)),
            Err(Error::MalformedModel(Cell::new(0, 1)))
        );
    }

    #[test]
    fn extract_from_empty_assignment() {
        let enc = encode_axioms(&Diagonal::identity(3), EoMethod::Binary);
        let vals = vec![LBool::Undef; enc.cnf.num_vars];
        let p = enc.varmap.extract_partial(Assignment::new(&vals)).unwrap();
        for c in Cell::all(3) {
            let expected = if c.is_diagonal() {
                Domain::single(c.row)
            } else {
                Domain::full(3).without(c.row)
            };
            assert_eq!(p.get(c), expected);
        }
    }

    #[test]
    fn extract_reports_empty_domain() {
        let enc = encode_axioms(&Diagonal::identity(3), EoMethod::Binary);
        let mut vals = vec![LBool::Undef; enc.cnf.num_vars];
        for v in enc.varmap.cell_group(Cell::new(0, 1)) {
            vals[v.index()] = LBool::False;
        }
        assert_eq!(
            enc.varmap.extract_partial(Assignment::new(&vals)),
            Err(Error::EmptyDomain(Cell::new(0, 1)))
        );
    }

    #[test]
    fn generation_is_deterministic() {
        let t = Diagonal::parse(4, "(1 2)").unwrap();
        let a = encode_axioms(&t, EoMethod::Commander);
        let b = encode_axioms(&t, EoMethod::Commander);
        let (mut da, mut db) = (Vec::new(), Vec::new());
        a.cnf.write_dimacs(&mut da).unwrap();
        b.cnf.write_dimacs(&mut db).unwrap();
        assert_eq!(da, db);
        assert!(String::from_utf8(da).unwrap().starts_with("p cnf "));
    }
}
