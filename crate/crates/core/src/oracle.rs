//! Brute-force reference enumeration and database checks for small sizes.
//!
//! Nothing here shares logic with the SAT pipeline: cycle sets come from
//! filtering row permutations, and orbits are computed by applying every
//! permutation of `S_n`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cycleset::{
    apply_to_cycle_set, extensions, satisfies_axioms, CycleSet, Domain, PartialCycleSet, Permutation,
};
use crate::error::{Error, Result};
use crate::symmetry::Diagonal;

/// Largest size enumerated without fixing the diagonal.
pub const FULL_LIMIT: usize = 4;
/// Largest size enumerated for a single diagonal.
pub const DIAGONAL_LIMIT: usize = 5;

/// Every cycle set of size `n`, `n ≤ 4`, sorted.
pub fn brute_force_all(n: usize) -> Result<Vec<CycleSet>> {
    if n > FULL_LIMIT {
        return Err(Error::SizeLimitExceeded { n, max: FULL_LIMIT });
    }
    if n == 0 {
        return Err(Error::Shape("size must be positive".into()));
    }
    let open = PartialCycleSet::new(n, vec![Domain::full(n); n * n])?;
    let mut all = extensions(&open)?;
    all.sort();
    Ok(all)
}

/// Every cycle set with diagonal `t`, `n ≤ 5`, sorted.
pub fn brute_force_diagonal(t: &Diagonal) -> Result<Vec<CycleSet>> {
    let n = t.n();
    if n > DIAGONAL_LIMIT {
        return Err(Error::SizeLimitExceeded { n, max: DIAGONAL_LIMIT });
    }
    let mut all = extensions(&PartialCycleSet::unconstrained(t.permutation()))?;
    all.sort();
    Ok(all)
}

/// The representative of a diagonal's conjugacy class.
pub fn canonical_diagonal(diagonal: &Permutation) -> Diagonal {
    let t = Diagonal::from_permutation(diagonal.clone());
    Diagonal::from_partition(&t.cycle_type()).expect("cycle types are valid partitions")
}

/// One representative per `S_n`-orbit: the smallest orbit element whose
/// diagonal is the canonical representative of its cycle type. Materializes
/// all `n!` images, so only meant for small `n`.
pub fn lex_min_reps(sets: &[CycleSet]) -> Vec<CycleSet> {
    let mut perms: HashMap<usize, Vec<Permutation>> = HashMap::new();
    let reps: BTreeSet<CycleSet> = sets
        .iter()
        .map(|c| {
            let group = perms.entry(c.n()).or_insert_with(|| Permutation::all(c.n()));
            orbit_representative(c, group)
        })
        .collect();
    reps.into_iter().collect()
}

fn orbit_representative(c: &CycleSet, group: &[Permutation]) -> CycleSet {
    let target = c.diagonal().map(|d| canonical_diagonal(&d));
    group
        .iter()
        .map(|pi| apply_to_cycle_set(pi, c))
        .filter(|img| match (&target, img.diagonal()) {
            (Some(t), Some(d)) => &d == t.permutation(),
            _ => true,
        })
        .min()
        .expect("some orbit element carries the canonical diagonal")
}

/// A permutation commuting with the diagonal of `c` that maps `c` strictly
/// below itself, if any.
pub fn lowering_permutation(c: &CycleSet, t: &Diagonal) -> Option<Permutation> {
    t.centralizer().into_iter().find(|pi| apply_to_cycle_set(pi, c) < *c)
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineFinding {
    pub line: usize,
    pub entry: String,
    pub detail: String,
}

/// Result of checking a database file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub n: usize,
    pub entries: usize,
    pub axiom_failures: Vec<LineFinding>,
    /// Entries whose diagonal is not the representative of its class.
    pub non_canonical_diagonal: Vec<LineFinding>,
    /// Entries outside the requested diagonal.
    pub wrong_diagonal: Vec<LineFinding>,
    pub non_lex_min: Vec<LineFinding>,
    pub duplicates: Vec<LineFinding>,
    /// Reference orbits absent from the file; only computed for `n ≤ 4`.
    pub missing: Option<Vec<String>>,
    pub per_diagonal: BTreeMap<String, usize>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.axiom_failures.is_empty()
            && self.non_canonical_diagonal.is_empty()
            && self.wrong_diagonal.is_empty()
            && self.non_lex_min.is_empty()
            && self.duplicates.is_empty()
            && self.missing.as_ref().is_none_or(|m| m.is_empty())
    }

    pub fn findings(&self) -> usize {
        self.axiom_failures.len()
            + self.non_canonical_diagonal.len()
            + self.wrong_diagonal.len()
            + self.non_lex_min.len()
            + self.duplicates.len()
            + self.missing.as_ref().map_or(0, |m| m.len())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "size {}: {} entries", self.n, self.entries);
        for (d, count) in &self.per_diagonal {
            let _ = writeln!(out, "  {d}: {count}");
        }
        let sections = [
            ("axiom failure", &self.axiom_failures),
            ("non-canonical diagonal", &self.non_canonical_diagonal),
            ("wrong diagonal", &self.wrong_diagonal),
            ("not lex-minimal", &self.non_lex_min),
            ("duplicate", &self.duplicates),
        ];
        for (label, items) in sections {
            for f in items {
                let _ = writeln!(out, "line {}: {label}: {} ({})", f.line, f.entry, f.detail);
            }
        }
        match &self.missing {
            Some(missing) => {
                for m in missing {
                    let _ = writeln!(out, "missing: {m}");
                }
            }
            None => {
                let _ = writeln!(out, "completeness not checked above size {FULL_LIMIT}");
            }
        }
        let _ = writeln!(out, "{}", if self.is_clean() { "clean" } else { "FINDINGS" });
        out
    }
}

/// Parses a database in the line format. Blank lines are skipped; line
/// numbers are 1-based.
pub fn parse_database(text: &str, n: usize) -> std::result::Result<Vec<(usize, CycleSet)>, VerifyError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let c = CycleSet::parse_line(raw).map_err(|source| VerifyError::Parse { line, source })?;
        if c.n() != n {
            return Err(VerifyError::Parse {
                line,
                source: Error::Shape(format!("expected size {n}, found size {}", c.n())),
            });
        }
        out.push((line, c));
    }
    Ok(out)
}

/// Checks a database file of size-`n` cycle sets, optionally restricted to
/// one diagonal.
pub fn verify_database(
    path: &Path,
    n: usize,
    per_diagonal: Option<&Diagonal>,
) -> std::result::Result<Report, VerifyError> {
    let text = fs::read_to_string(path).map_err(|source| VerifyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let entries = parse_database(&text, n)?;
    Ok(verify_entries(&entries, n, per_diagonal))
}

pub fn verify_entries(entries: &[(usize, CycleSet)], n: usize, per_diagonal: Option<&Diagonal>) -> Report {
    let finding = |line: usize, c: &CycleSet, detail: String| LineFinding {
        line,
        entry: c.to_line(),
        detail,
    };
    let mut report = Report {
        n,
        entries: entries.len(),
        axiom_failures: Vec::new(),
        non_canonical_diagonal: Vec::new(),
        wrong_diagonal: Vec::new(),
        non_lex_min: Vec::new(),
        duplicates: Vec::new(),
        missing: None,
        per_diagonal: BTreeMap::new(),
    };

    let mut seen: HashMap<&CycleSet, usize> = HashMap::new();
    let mut to_check: Vec<(usize, &CycleSet, Diagonal)> = Vec::new();
    for (line, c) in entries {
        if let Some(first) = seen.get(c) {
            report
                .duplicates
                .push(finding(*line, c, format!("same as line {first}")));
            continue;
        }
        seen.insert(c, *line);
        if !satisfies_axioms(c) {
            report.axiom_failures.push(finding(*line, c, "axioms violated".into()));
            continue;
        }
        let diag = c.diagonal().expect("axioms imply a bijective diagonal");
        let canonical = canonical_diagonal(&diag);
        *report.per_diagonal.entry(canonical.to_string()).or_default() += 1;
        if canonical.permutation() != &diag {
            report.non_canonical_diagonal.push(finding(
                *line,
                c,
                format!("diagonal {diag}, representative {canonical}"),
            ));
            continue;
        }
        if let Some(want) = per_diagonal {
            if want.permutation() != &diag {
                report
                    .wrong_diagonal
                    .push(finding(*line, c, format!("diagonal {diag}, expected {want}")));
                continue;
            }
        }
        to_check.push((*line, c, canonical));
    }

    let lowered: Vec<(usize, &CycleSet, Permutation)> = to_check
        .par_iter()
        .filter_map(|(line, c, t)| lowering_permutation(c, t).map(|pi| (*line, *c, pi)))
        .collect();
    for (line, c, pi) in lowered {
        report.non_lex_min.push(finding(line, c, format!("lowered by {pi}")));
    }

    if n <= FULL_LIMIT {
        let reference = brute_force_all(n).map(|all| lex_min_reps(&all)).unwrap_or_default();
        let missing = reference
            .into_iter()
            .filter(|r| per_diagonal.is_none_or(|t| r.diagonal().as_ref() == Some(t.permutation())))
            .filter(|r| !seen.contains_key(r))
            .map(|r| r.to_line())
            .collect();
        report.missing = Some(missing);
    }
    report
}
