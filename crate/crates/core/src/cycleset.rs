//! Cycle sets, partial cycle sets, permutations and the orders between them.
//!
//! Values and indices are 0-based internally and printed 1-based. Cells are
//! ordered row-major.

use std::fmt;

use crate::error::{Error, Result};

/// Largest size supported by the bitset domains.
pub const MAX_N: usize = 16;

/// A matrix position, ordered row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Cell {
        Cell { row, col }
    }

    pub fn index(self, n: usize) -> usize {
        self.row * n + self.col
    }

    pub fn from_index(index: usize, n: usize) -> Cell {
        Cell::new(index / n, index % n)
    }

    pub fn is_diagonal(self) -> bool {
        self.row == self.col
    }

    /// The previous cell in row-major order, if any.
    pub fn pred(self, n: usize) -> Option<Cell> {
        let i = self.index(n);
        (i > 0).then(|| Cell::from_index(i - 1, n))
    }

    pub fn all(n: usize) -> impl Iterator<Item = Cell> {
        (0..n * n).map(move |i| Cell::from_index(i, n))
    }

    pub fn off_diagonal(n: usize) -> impl Iterator<Item = Cell> {
        Cell::all(n).filter(|c| !c.is_diagonal())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row + 1, self.col + 1)
    }
}

/// A set of values, as a bitset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Domain(pub u32);

impl Domain {
    pub const EMPTY: Domain = Domain(0);

    pub fn full(n: usize) -> Domain {
        Domain(((1u64 << n) - 1) as u32)
    }

    pub fn single(v: usize) -> Domain {
        Domain(1 << v)
    }

    pub fn from_values(values: impl IntoIterator<Item = usize>) -> Domain {
        Domain(values.into_iter().fold(0, |acc, v| acc | 1 << v))
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn without(self, v: usize) -> Domain {
        Domain(self.0 & !(1 << v))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_singleton(self) -> bool {
        self.0.is_power_of_two()
    }

    /// The only value of a singleton domain.
    pub fn value(self) -> Option<usize> {
        self.is_singleton().then(|| self.0.trailing_zeros() as usize)
    }

    pub fn min(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (!self.is_empty()).then(|| 31 - self.0.leading_zeros() as usize)
    }

    pub fn intersect(self, other: Domain) -> Domain {
        Domain(self.0 & other.0)
    }

    /// Values in ascending order.
    pub fn iter(self) -> impl DoubleEndedIterator<Item = usize> {
        (0..32).filter(move |&v| self.contains(v))
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v + 1)).finish()
    }
}

/// `max S ≤ min S'`.
pub fn domain_leq(s: Domain, t: Domain) -> bool {
    match (s.max(), t.min()) {
        (Some(a), Some(b)) => a <= b,
        _ => false,
    }
}

/// `max S < min S'`.
pub fn domain_lt(s: Domain, t: Domain) -> bool {
    match (s.max(), t.min()) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    }
}

/// A bijection on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(images.iter().map(|v| v + 1).collect()));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u8).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&x| x as usize)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Permutation { images: inv }
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Disjoint cycles, each starting at its smallest element, fixed points
    /// included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            out.push(cycle);
        }
        out
    }

    /// All permutations of `0..n` in lexicographic order of their images.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut p: Vec<u8> = (0..n as u8).collect();
        loop {
            out.push(Permutation { images: p.clone() });
            // next permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
            p.swap(i, j);
            p[i + 1..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// A complete `n × n` matrix over `0..n`. Ordering is lexicographic in
/// row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleSet {
    n: usize,
    entries: Vec<u8>,
}

impl CycleSet {
    /// Builds a matrix from row-major entries; does not check the axioms.
    pub fn new(n: usize, entries: Vec<usize>) -> Result<CycleSet> {
        if n == 0 || n > MAX_N {
            return Err(Error::SizeLimitExceeded { n, max: MAX_N });
        }
        if entries.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(&v) = entries.iter().find(|&&v| v >= n) {
            return Err(Error::Shape(format!("value {} out of range 1..{}", v + 1, n)));
        }
        Ok(CycleSet {
            n,
            entries: entries.into_iter().map(|v| v as u8).collect(),
        })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<CycleSet> {
        let n = rows.len();
        CycleSet::new(n, rows.iter().flatten().copied().collect())
    }

    /// Parses 1-based rows, for literals in tests and examples.
    pub fn from_one_based(rows: &[&[usize]]) -> Result<CycleSet> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            for &v in r.iter() {
                if v == 0 {
                    return Err(Error::Shape("value 0 in 1-based matrix".into()));
                }
                entries.push(v - 1);
            }
        }
        CycleSet::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.n + j] as usize
    }

    #[inline]
    pub fn at(&self, c: Cell) -> usize {
        self.get(c.row, c.col)
    }

    pub fn entries(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&v| v as usize)
    }

    /// The diagonal `i ↦ C[i,i]`, if it is a permutation.
    pub fn diagonal(&self) -> Option<Permutation> {
        Permutation::from_images((0..self.n).map(|i| self.get(i, i)).collect()).ok()
    }

    pub fn to_partial(&self) -> PartialCycleSet {
        PartialCycleSet {
            n: self.n,
            domains: self.entries.iter().map(|&v| Domain::single(v as usize)).collect(),
        }
    }

    /// One line of `n·n` space-separated 1-based values.
    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self.entries.iter().map(|v| (v + 1).to_string()).collect();
        parts.join(" ")
    }

    /// Parses the line format; the size is inferred from the entry count.
    pub fn parse_line(line: &str) -> Result<CycleSet> {
        let values: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Shape(format!("not a number: {t:?}")))
            })
            .collect::<Result<_>>()?;
        let n = (values.len() as f64).sqrt().round() as usize;
        if n * n != values.len() || n == 0 {
            return Err(Error::Shape(format!("{} entries is not a square", values.len())));
        }
        if values.iter().any(|&v| v == 0 || v > n) {
            return Err(Error::Shape(format!("values must lie in 1..{n}")));
        }
        CycleSet::new(n, values.into_iter().map(|v| v - 1).collect())
    }
}

impl fmt::Display for CycleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| (self.get(i, j) + 1).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Checks row bijectivity, non-degeneracy and the cycloid equation.
pub fn satisfies_axioms(c: &CycleSet) -> bool {
    let n = c.n();
    for i in 0..n {
        let row = Domain::from_values((0..n).map(|j| c.get(i, j)));
        if row != Domain::full(n) {
            return false;
        }
    }
    if c.diagonal().is_none() {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            let xy = c.get(x, y);
            let yx = c.get(y, x);
            for z in 0..n {
                if c.get(xy, c.get(x, z)) != c.get(yx, c.get(y, z)) {
                    return false;
                }
            }
        }
    }
    true
}

/// A matrix of non-empty candidate sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialCycleSet {
    n: usize,
    domains: Vec<Domain>,
}

impl PartialCycleSet {
    pub fn new(n: usize, domains: Vec<Domain>) -> Result<PartialCycleSet> {
        if n == 0 || n > MAX_N {
            return Err(Error::SizeLimitExceeded { n, max: MAX_N });
        }
        if domains.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} domains, got {}",
                n * n,
                domains.len()
            )));
        }
        let full = Domain::full(n);
        for (i, d) in domains.iter().enumerate() {
            if d.is_empty() {
                return Err(Error::EmptyDomain(Cell::from_index(i, n)));
            }
            if d.0 & !full.0 != 0 {
                return Err(Error::Shape(format!("domain {d:?} exceeds 1..{n}")));
            }
        }
        Ok(PartialCycleSet { n, domains })
    }

    /// Every off-diagonal cell gets all values except `diagonal(i)`; the
    /// diagonal cells are fixed.
    pub fn unconstrained(diagonal: &Permutation) -> PartialCycleSet {
        let n = diagonal.n();
        let domains = Cell::all(n)
            .map(|c| {
                let d = diagonal.apply(c.row);
                if c.is_diagonal() {
                    Domain::single(d)
                } else {
                    Domain::full(n).without(d)
                }
            })
            .collect();
        PartialCycleSet { n, domains }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, c: Cell) -> Domain {
        self.domains[c.index(self.n)]
    }

    pub fn set(&mut self, c: Cell, d: Domain) -> Result<()> {
        if d.is_empty() {
            return Err(Error::EmptyDomain(c));
        }
        self.domains[c.index(self.n)] = d;
        Ok(())
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn is_complete(&self) -> bool {
        self.domains.iter().all(|d| d.is_singleton())
    }

    pub fn to_cycle_set(&self) -> Option<CycleSet> {
        let entries: Option<Vec<usize>> = self.domains.iter().map(|d| d.value()).collect();
        CycleSet::new(self.n, entries?).ok()
    }

    /// True when every complete matrix of `other` is allowed here.
    pub fn contains(&self, c: &CycleSet) -> bool {
        c.n() == self.n && Cell::all(self.n).all(|cell| self.get(cell).contains(c.at(cell)))
    }
}

/// `π(P)_{i,j} = π⁻¹(P_{π(i),π(j)})`.
pub fn apply_permutation(pi: &Permutation, p: &PartialCycleSet) -> PartialCycleSet {
    let n = p.n();
    let inv = pi.inverse();
    let domains = Cell::all(n)
        .map(|c| {
            let src = p.get(Cell::new(pi.apply(c.row), pi.apply(c.col)));
            Domain::from_values(src.iter().map(|x| inv.apply(x)))
        })
        .collect();
    PartialCycleSet { n, domains }
}

/// `π(C)_{i,j} = π⁻¹(C_{π(i),π(j)})` on complete matrices.
pub fn apply_to_cycle_set(pi: &Permutation, c: &CycleSet) -> CycleSet {
    let n = c.n();
    let inv = pi.inverse();
    let entries = Cell::all(n)
        .map(|cell| inv.apply(c.get(pi.apply(cell.row), pi.apply(cell.col))) as u8)
        .collect();
    CycleSet { n, entries }
}

/// `P ⊴ P'` on every cell up to and including `c`.
pub fn below_upto(p: &PartialCycleSet, q: &PartialCycleSet, c: Cell) -> bool {
    let n = p.n();
    (0..=c.index(n)).all(|i| domain_leq(p.domains[i], q.domains[i]))
}

/// The cell at which `P` becomes strictly smaller than `P'`: the first cell
/// with `P_c ⊲ P'_c`, provided `P ⊴ P'` holds on all earlier cells.
pub fn strictly_below(p: &PartialCycleSet, q: &PartialCycleSet) -> Option<Cell> {
    let n = p.n();
    for i in 0..n * n {
        let (a, b) = (p.domains[i], q.domains[i]);
        if domain_lt(a, b) {
            return Some(Cell::from_index(i, n));
        }
        if !domain_leq(a, b) {
            return None;
        }
    }
    None
}

/// All complete cycle sets allowed by `p`. Test-only oracle, `n ≤ 5`.
pub fn extensions(p: &PartialCycleSet) -> Result<Vec<CycleSet>> {
    const LIMIT: usize = 5;
    let n = p.n();
    if n > LIMIT {
        return Err(Error::SizeLimitExceeded { n, max: LIMIT });
    }
    let mut rows: Vec<Vec<Vec<u8>>> = Vec::with_capacity(n);
    for i in 0..n {
        let candidates = Permutation::all(n)
            .into_iter()
            .filter(|perm| (0..n).all(|j| p.get(Cell::new(i, j)).contains(perm.apply(j))))
            .map(|perm| perm.images)
            .collect();
        rows.push(candidates);
    }
    let mut out = Vec::new();
    let mut current = vec![0u8; n * n];
    extend_rows(n, &rows, 0, &mut current, &mut out);
    Ok(out)
}

fn extend_rows(n: usize, rows: &[Vec<Vec<u8>>], i: usize, current: &mut Vec<u8>, out: &mut Vec<CycleSet>) {
    if i == n {
        let c = CycleSet {
            n,
            entries: current.clone(),
        };
        if satisfies_axioms(&c) {
            out.push(c);
        }
        return;
    }
    for row in &rows[i] {
        current[i * n..(i + 1) * n].copy_from_slice(row);
        if partial_axioms_hold(n, current, i + 1) {
            extend_rows(n, rows, i + 1, current, out);
        }
    }
}

/// Checks the cycloid equation on every instance whose entries lie in the
/// first `filled` rows, and distinctness of the diagonal so far.
fn partial_axioms_hold(n: usize, m: &[u8], filled: usize) -> bool {
    let get = |i: usize, j: usize| m[i * n + j] as usize;
    let mut diag = Domain::EMPTY;
    for i in 0..filled {
        let d = get(i, i);
        if diag.contains(d) {
            return false;
        }
        diag.insert(d);
    }
    for x in 0..filled {
        for y in 0..filled {
            let (xy, yx) = (get(x, y), get(y, x));
            if xy >= filled || yx >= filled {
                continue;
            }
            for z in 0..n {
                if get(xy, get(x, z)) != get(yx, get(y, z)) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(rows: &[&[usize]]) -> CycleSet {
        CycleSet::from_one_based(rows).unwrap()
    }

    /// The 3×3 partial cycle set with an undecided bottom row.
    pub(crate) fn example_partial() -> PartialCycleSet {
        let one = |v: usize| Domain::single(v - 1);
        let d12 = Domain::from_values([0, 1]);
        PartialCycleSet::new(
            3,
            vec![one(2), one(1), one(3), one(2), one(1), one(3), d12, d12, one(3)],
        )
        .unwrap()
    }

    #[test]
    fn axioms_on_size_two() {
        assert!(satisfies_axioms(&cs(&[&[1, 2], &[1, 2]])));
        assert!(satisfies_axioms(&cs(&[&[2, 1], &[2, 1]])));
        assert!(!satisfies_axioms(&cs(&[&[1, 2], &[2, 1]])));
    }

    #[test]
    fn domain_orders() {
        let d = |v: &[usize]| Domain::from_values(v.iter().map(|x| x - 1));
        assert!(domain_lt(d(&[1]), d(&[2, 3])) && domain_leq(d(&[1]), d(&[2, 3])));
        assert!(!domain_lt(d(&[1, 2]), d(&[2, 3])) && domain_leq(d(&[1, 2]), d(&[2, 3])));
        assert!(!domain_lt(d(&[1, 3]), d(&[2])) && !domain_leq(d(&[1, 3]), d(&[2])));
    }

    #[test]
    fn example_extensions() {
        let mut ext = extensions(&example_partial()).unwrap();
        ext.sort();
        assert_eq!(
            ext,
            vec![
                cs(&[&[2, 1, 3], &[2, 1, 3], &[1, 2, 3]]),
                cs(&[&[2, 1, 3], &[2, 1, 3], &[2, 1, 3]])
            ]
        );
    }

    #[test]
    fn complete_partial_extends_to_itself() {
        let c = cs(&[&[2, 1, 3], &[2, 1, 3], &[1, 2, 3]]);
        assert_eq!(extensions(&c.to_partial()).unwrap(), vec![c]);
    }

    #[test]
    fn size_two_extensions_of_everything() {
        let p = PartialCycleSet::new(2, vec![Domain::full(2); 4]).unwrap();
        assert_eq!(extensions(&p).unwrap().len(), 2);
    }

    #[test]
    fn extensions_refuse_large_sizes() {
        let p = PartialCycleSet::unconstrained(&Permutation::identity(6));
        assert!(matches!(extensions(&p), Err(Error::SizeLimitExceeded { .. })));
    }

    #[test]
    fn transposition_fixes_example_solution() {
        let c = cs(&[&[2, 1, 3], &[2, 1, 3], &[1, 2, 3]]);
        let pi = Permutation::from_images(vec![1, 0, 2]).unwrap();
        assert_eq!(apply_to_cycle_set(&pi, &c), c);
        assert_eq!(apply_permutation(&pi, &c.to_partial()), c.to_partial());
    }

    #[test]
    fn example_is_not_below_itself() {
        let p = example_partial();
        assert!(!below_upto(&p, &p, Cell::new(2, 0)));
        assert!(below_upto(&p, &p, Cell::new(1, 2)));
        assert_eq!(strictly_below(&p, &p), None);
    }

    #[test]
    fn strict_at_first_cell() {
        let mut p = PartialCycleSet::unconstrained(&Permutation::identity(3));
        let mut q = p.clone();
        p.set(Cell::new(0, 1), Domain::single(0)).unwrap();
        q.set(Cell::new(0, 1), Domain::single(1)).unwrap();
        // (1,1) is fixed and equal on both sides
        assert_eq!(strictly_below(&p, &q), Some(Cell::new(0, 1)));
    }

    #[test]
    fn permutation_basics() {
        let pi = Permutation::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(pi.compose(&pi.inverse()), Permutation::identity(3));
        assert_eq!(pi.to_string(), "(1 2 3)");
        assert_eq!(Permutation::identity(4).to_string(), "id");
        assert_eq!(Permutation::all(4).len(), 24);
        assert!(Permutation::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn line_round_trip() {
        let c = cs(&[&[2, 1, 3], &[2, 1, 3], &[1, 2, 3]]);
        assert_eq!(c.to_line(), "2 1 3 2 1 3 1 2 3");
        assert_eq!(CycleSet::parse_line(&c.to_line()).unwrap(), c);
        assert!(CycleSet::parse_line("1 2 3").is_err());
        assert!(CycleSet::parse_line("1 2 3 4").is_err());
    }
}
