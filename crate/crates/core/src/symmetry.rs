//! Diagonals, conjugacy-class representatives, centralizers and partial
//! permutations.

use std::fmt;

use crate::cycleset::{Domain, Permutation, MAX_N};
use crate::error::{Error, Result};

/// Partitions of `n` in reverse-lexicographic order, largest part first.
pub fn integer_partitions(n: usize) -> Result<Vec<Vec<usize>>> {
    if n > MAX_N {
        return Err(Error::SizeLimitExceeded { n, max: MAX_N });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    partitions_rec(n, n, &mut current, &mut out);
    Ok(out)
}

fn partitions_rec(rest: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if rest == 0 {
        out.push(current.clone());
        return;
    }
    for part in (1..=rest.min(max_part)).rev() {
        current.push(part);
        partitions_rec(rest - part, part, current, out);
        current.pop();
    }
}

/// A permutation used as the fixed diagonal `i ↦ C[i,i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagonal {
    perm: Permutation,
    cycles: Vec<Vec<usize>>,
    cycle_of: Vec<usize>,
}

impl Diagonal {
    pub fn from_permutation(perm: Permutation) -> Diagonal {
        let cycles = perm.cycles();
        let mut cycle_of = vec![0; perm.n()];
        for (k, c) in cycles.iter().enumerate() {
            for &x in c {
                cycle_of[x] = k;
            }
        }
        Diagonal { perm, cycles, cycle_of }
    }

    pub fn identity(n: usize) -> Diagonal {
        Diagonal::from_permutation(Permutation::identity(n))
    }

    /// The canonical representative of a cycle type: parts become cycles on
    /// consecutive elements, so `[2, 2, 1]` gives `(1 2)(3 4)`.
    pub fn from_partition(partition: &[usize]) -> Result<Diagonal> {
        if partition.contains(&0) {
            return Err(Error::InvalidPartition(partition.to_vec()));
        }
        let n: usize = partition.iter().sum();
        if n == 0 || n > MAX_N {
            return Err(Error::SizeLimitExceeded { n, max: MAX_N });
        }
        let mut images = vec![0; n];
        let mut start = 0;
        for &len in partition {
            for k in 0..len {
                images[start + k] = start + (k + 1) % len;
            }
            start += len;
        }
        Ok(Diagonal::from_permutation(Permutation::from_images(images)?))
    }

    /// One representative per conjugacy class of `S_n`, in partition order.
    pub fn representatives(n: usize) -> Result<Vec<Diagonal>> {
        integer_partitions(n)?
            .iter()
            .map(|p| Diagonal::from_partition(p))
            .collect()
    }

    /// Parses cycle notation: `id`, `(1 2)(3 4)`, or the compact `(12)(34)`
    /// when every element is a single digit.
    pub fn parse(n: usize, text: &str) -> Result<Diagonal> {
        let bad = || Error::CycleNotation(text.to_string());
        let t = text.trim();
        if t == "id" || t.is_empty() {
            return Ok(Diagonal::identity(n));
        }
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        let mut rest = t;
        while !rest.is_empty() {
            let inner_end = rest.find(')').ok_or_else(bad)?;
            if !rest.starts_with('(') {
                return Err(bad());
            }
            let inner = rest[1..inner_end].trim();
            rest = rest[inner_end + 1..].trim_start();
            let elems: Vec<usize> = if inner.contains(char::is_whitespace) || inner.contains(',') {
                inner
                    .split(|ch: char| ch.is_whitespace() || ch == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<_>>()?
            } else {
                inner
                    .chars()
                    .map(|ch| ch.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                    .collect::<Result<_>>()?
            };
            for &e in &elems {
                if e == 0 || e > n || used[e - 1] {
                    return Err(bad());
                }
                used[e - 1] = true;
            }
            for k in 0..elems.len() {
                images[elems[k] - 1] = elems[(k + 1) % elems.len()] - 1;
            }
        }
        Ok(Diagonal::from_permutation(Permutation::from_images(images)?))
    }

    pub fn n(&self) -> usize {
        self.perm.n()
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    #[inline]
    pub fn successor(&self, x: usize) -> usize {
        self.perm.apply(x)
    }

    /// All cycles including fixed points, each starting at its smallest
    /// element.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn cycle_of(&self, x: usize) -> &[usize] {
        &self.cycles[self.cycle_of[x]]
    }

    pub fn cycle_len(&self, x: usize) -> usize {
        self.cycles[self.cycle_of[x]].len()
    }

    /// Cycle lengths, largest first.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles.iter().map(|c| c.len()).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// Elements whose cycle has the same length as that of `x`.
    pub fn same_length_class(&self, x: usize) -> Domain {
        let len = self.cycle_len(x);
        Domain::from_values((0..self.n()).filter(|&y| self.cycle_len(y) == len))
    }

    /// Every permutation commuting with the diagonal.
    pub fn centralizer(&self) -> Vec<Permutation> {
        let mut out = Vec::new();
        let start = PartialPermutation::from_diagonal(self);
        centralizer_rec(self, start, &mut out);
        out.sort();
        out
    }
}

fn centralizer_rec(t: &Diagonal, pp: PartialPermutation, out: &mut Vec<Permutation>) {
    let Some(x) = (0..t.n()).find(|&x| !pp.is_fixed(x)) else {
        out.push(pp.extract_permutation());
        return;
    };
    for y in pp.candidates(x).iter() {
        if let Ok(next) = pp.propagate_cycle(t, x, y) {
            centralizer_rec(t, next, out);
        }
    }
}

impl fmt::Display for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.perm.fmt(f)
    }
}

/// `π ∘ T = T ∘ π`.
pub fn fixes_diagonal(pi: &Permutation, t: &Diagonal) -> bool {
    pi.n() == t.n() && (0..t.n()).all(|x| pi.apply(t.successor(x)) == t.successor(pi.apply(x)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Block {
    positions: Domain,
    // candidate images, in written order
    values: Vec<u8>,
}

/// A set of candidate permutations given as an ordered partition.
///
/// Each block pairs a set of positions with an equally large list of
/// values: every position of the block maps to one of the block's values.
/// Blocks are kept sorted by their smallest position. A block built by
/// [`PartialPermutation::from_blocks`] occupies the next free positions, so
/// blocks earlier in the list hold the smaller preimages.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialPermutation {
    n: usize,
    blocks: Vec<Block>,
}

impl PartialPermutation {
    /// Blocks of values in order; block `k` receives the next
    /// `blocks[k].len()` positions.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<PartialPermutation> {
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        if n == 0 || n > MAX_N {
            return Err(Error::SizeLimitExceeded { n, max: MAX_N });
        }
        let mut seen = Domain::EMPTY;
        let mut out = Vec::new();
        let mut next = 0;
        for b in blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition(b.clone()));
            }
            for &v in b {
                if v >= n || seen.contains(v) {
                    return Err(Error::InvalidPartition(b.clone()));
                }
                seen.insert(v);
            }
            out.push(Block {
                positions: Domain::from_values(next..next + b.len()),
                values: b.iter().map(|&v| v as u8).collect(),
            });
            next += b.len();
        }
        Ok(PartialPermutation { n, blocks: out })
    }

    /// All permutations that map every cycle of `t` to a cycle of the same
    /// length: one block per cycle length.
    pub fn from_diagonal(t: &Diagonal) -> PartialPermutation {
        let n = t.n();
        let mut blocks: Vec<Block> = Vec::new();
        let mut covered = Domain::EMPTY;
        for x in 0..n {
            if covered.contains(x) {
                continue;
            }
            let class = t.same_length_class(x);
            covered = Domain(covered.0 | class.0);
            blocks.push(Block {
                positions: class,
                values: class.iter().map(|v| v as u8).collect(),
            });
        }
        PartialPermutation { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn block_of_position(&self, x: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.positions.contains(x))
            .expect("positions cover 0..n")
    }

    fn block_of_value(&self, y: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.values.contains(&(y as u8)))
            .expect("values cover 0..n")
    }

    /// Possible images of `x`.
    pub fn candidates(&self, x: usize) -> Domain {
        Domain::from_values(
            self.blocks[self.block_of_position(x)]
                .values
                .iter()
                .map(|&v| v as usize),
        )
    }

    /// Possible preimages of `y`.
    pub fn preimage_candidates(&self, y: usize) -> Domain {
        self.blocks[self.block_of_value(y)].positions
    }

    pub fn is_fixed(&self, x: usize) -> bool {
        self.blocks[self.block_of_position(x)].positions.is_singleton()
    }

    pub fn image(&self, x: usize) -> Option<usize> {
        let b = &self.blocks[self.block_of_position(x)];
        b.positions.is_singleton().then(|| b.values[0] as usize)
    }

    pub fn preimage(&self, y: usize) -> Option<usize> {
        let b = &self.blocks[self.block_of_value(y)];
        b.positions.value()
    }

    pub fn is_complete(&self) -> bool {
        self.blocks.len() == self.n
    }

    /// Written blocks of values, in order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.values.iter().map(|&v| v as usize).collect())
            .collect()
    }

    /// Restricts `x` to map to `y`.
    pub fn fix(&self, x: usize, y: usize) -> Result<PartialPermutation> {
        if x >= self.n || y >= self.n {
            return Err(Error::InconsistentRefinement);
        }
        let k = self.block_of_position(x);
        let b = &self.blocks[k];
        let Some(vpos) = b.values.iter().position(|&v| v as usize == y) else {
            return Err(Error::InconsistentRefinement);
        };
        if b.positions.is_singleton() {
            return Ok(self.clone());
        }
        let mut rest_values = b.values.clone();
        rest_values.remove(vpos);
        let rest = Block {
            positions: b.positions.without(x),
            values: rest_values,
        };
        let single = Block {
            positions: Domain::single(x),
            values: vec![y as u8],
        };
        let mut blocks = self.blocks.clone();
        blocks[k] = rest;
        blocks.push(single);
        blocks.sort_by_key(|b| b.positions.min());
        Ok(PartialPermutation { n: self.n, blocks })
    }

    /// Fixes `π(x) = y` and, to stay in the centralizer of `t`, the whole
    /// cycle of `x` onto the cycle of `y`.
    pub fn propagate_cycle(&self, t: &Diagonal, x: usize, y: usize) -> Result<PartialPermutation> {
        if t.n() != self.n || t.cycle_len(x) != t.cycle_len(y) {
            return Err(Error::InconsistentRefinement);
        }
        let mut out = self.clone();
        let (mut a, mut b) = (x, y);
        for _ in 0..t.cycle_len(x) {
            match out.image(a) {
                Some(img) if img == b => {}
                Some(_) => return Err(Error::InconsistentRefinement),
                None => out = out.fix(a, b)?,
            }
            a = t.successor(a);
            b = t.successor(b);
        }
        Ok(out)
    }

    /// A permutation from the set: within each block, sorted positions take
    /// the values in written order.
    pub fn extract_permutation(&self) -> Permutation {
        let mut images = vec![0; self.n];
        for b in &self.blocks {
            for (x, &v) in b.positions.iter().zip(&b.values) {
                images[x] = v as usize;
            }
        }
        Permutation::from_images(images).expect("blocks form a bijection")
    }

    /// Completes the open cycles of `t` one at a time, each onto the
    /// smallest available cycle of matching length.
    pub fn complete_in_centralizer(&self, t: &Diagonal) -> Option<Permutation> {
        let mut pp = self.clone();
        while let Some(x) = (0..self.n).find(|&x| !pp.is_fixed(x)) {
            pp = pp.candidates(x).iter().find_map(|y| pp.propagate_cycle(t, x, y).ok())?;
        }
        Some(pp.extract_permutation())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm1(images: &[usize]) -> Permutation {
        Permutation::from_images(images.iter().map(|x| x - 1).collect()).unwrap()
    }

    #[test]
    fn partitions_of_four() {
        assert_eq!(
            integer_partitions(4).unwrap(),
            vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
        );
        assert_eq!(integer_partitions(1).unwrap(), vec![vec![1]]);
        assert!(integer_partitions(17).is_err());
    }

    #[test]
    fn representative_labels() {
        assert_eq!(Diagonal::from_partition(&[1, 1, 1]).unwrap().to_string(), "id");
        assert_eq!(Diagonal::from_partition(&[2, 1, 1, 1]).unwrap().to_string(), "(1 2)");
        assert_eq!(
            Diagonal::from_partition(&[2, 2, 1, 1]).unwrap().to_string(),
            "(1 2)(3 4)"
        );
        assert_eq!(Diagonal::from_partition(&[3, 2]).unwrap().to_string(), "(1 2 3)(4 5)");
    }

    #[test]
    fn parse_cycle_notation() {
        let d = Diagonal::parse(5, "(1 2)(3 4)").unwrap();
        assert_eq!(d, Diagonal::parse(5, "(12)(34)").unwrap());
        assert_eq!(d.cycle_type(), vec![2, 2, 1]);
        assert_eq!(Diagonal::parse(3, "id").unwrap(), Diagonal::identity(3));
        assert!(Diagonal::parse(3, "(1 1)").is_err());
        assert!(Diagonal::parse(3, "(1 4)").is_err());
        assert!(Diagonal::parse(3, "1 2").is_err());
    }

    fn example_diagonal() -> Diagonal {
        Diagonal::parse(6, "(2 3 1)(5 6 4)").unwrap()
    }

    #[test]
    fn fixing_one_point_fixes_its_cycle() {
        let t = example_diagonal();
        let pp = PartialPermutation::from_diagonal(&t).propagate_cycle(&t, 0, 5).unwrap();
        assert_eq!(pp.image(0), Some(5));
        assert_eq!(pp.image(2), Some(4));
        assert_eq!(pp.image(1), Some(3));
        let pi = pp.complete_in_centralizer(&t).unwrap();
        assert!(fixes_diagonal(&pi, &t));
        assert_eq!(pi, perm1(&[6, 4, 5, 1, 2, 3]));
    }

    #[test]
    fn fixed_point_of_identity() {
        let t = Diagonal::identity(3);
        let pp = PartialPermutation::from_diagonal(&t).propagate_cycle(&t, 0, 0).unwrap();
        assert_eq!(pp.image(0), Some(0));
        assert!(!pp.candidates(1).contains(0));
        assert!(!pp.candidates(2).contains(0));
    }

    #[test]
    fn length_mismatch_is_inconsistent() {
        let t = Diagonal::parse(5, "(1 2 3)(4 5)").unwrap();
        let pp = PartialPermutation::from_diagonal(&t);
        assert_eq!(pp.propagate_cycle(&t, 0, 3), Err(Error::InconsistentRefinement));
    }

    #[test]
    fn extract_written_order() {
        let pp = PartialPermutation::from_blocks(&[vec![5, 4, 3], vec![2], vec![1, 0]]).unwrap();
        assert_eq!(pp.extract_permutation(), perm1(&[6, 5, 4, 3, 2, 1]));
        let swap = PartialPermutation::from_blocks(&[vec![1], vec![0]]).unwrap();
        assert_eq!(swap.extract_permutation().to_string(), "(1 2)");
    }

    #[test]
    fn centralizer_commutation() {
        let t = Diagonal::parse(3, "(1 2)").unwrap();
        assert!(!fixes_diagonal(&perm1(&[3, 2, 1]), &t));
        assert!(fixes_diagonal(&Permutation::identity(3), &t));
        assert_eq!(t.centralizer().len(), 2);
        assert_eq!(example_diagonal().centralizer().len(), 18);
    }
}
