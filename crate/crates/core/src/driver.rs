//! Per-diagonal enumeration with a minimality check attached to the solver.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use cyclesat_engine::{Assignment, ExternalPropagator, Lit, Solver, SolverConfig, SolverError};
use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backtrack::{BacktrackChecker, SearchBudget};
use crate::cycleset::{CycleSet, PartialCycleSet, MAX_N};
use crate::encoding::{encode_axioms, EoMethod, VarMap};
use crate::error::Error;
use crate::incremental::{OracleInstance, OracleKind};
use crate::learning::{blocking_clause, breaking_clause, optimize_clause, propagation_clause};
use crate::mincheck::MinCheckOutcome;
use crate::oracle::canonical_diagonal;
use crate::symmetry::Diagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Backtrack,
    Incremental,
}

impl Backend {
    /// Default partial-check frequency divisor.
    pub fn default_freq(self) -> u32 {
        match self {
            Backend::Backtrack => 50,
            Backend::Incremental => 100,
        }
    }

    /// Default node limit (backtrack) or conflict limit (incremental).
    pub fn default_limit(self) -> u64 {
        match self {
            Backend::Backtrack => 200,
            Backend::Incremental => 10,
        }
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "backtrack" => Ok(Backend::Backtrack),
            "incremental" => Ok(Backend::Incremental),
            _ => Err(format!("unknown backend {s:?}")),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Backtrack => "backtrack",
            Backend::Incremental => "incremental",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    /// Cycle notation of one diagonal; `None` or `"all"` selects every
    /// conjugacy class.
    pub diagonal: Option<String>,
    pub backend: Backend,
    /// Partial checks run on every `freq`-th decision; 0 disables them.
    pub freq: u32,
    /// Node limit (backtrack) or conflict limit (incremental) of partial
    /// checks.
    pub limit: u64,
    pub eo: EoMethod,
    pub workers: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(n: usize, backend: Backend) -> RunConfig {
        RunConfig {
            n,
            diagonal: None,
            backend,
            freq: backend.default_freq(),
            limit: backend.default_limit(),
            eo: EoMethod::default(),
            workers: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if !(2..=MAX_N).contains(&self.n) {
            return Err(RunError::InvalidConfig(format!("size must lie in 2..={MAX_N}")));
        }
        if self.limit == 0 {
            return Err(RunError::InvalidConfig("the check limit must be positive".into()));
        }
        if self.workers == 0 {
            return Err(RunError::InvalidConfig("at least one worker is needed".into()));
        }
        self.diagonals().map(|_| ())
    }

    /// The selected diagonals: class representatives in partition order.
    /// A non-canonical diagonal selects its conjugacy class.
    pub fn diagonals(&self) -> Result<Vec<Diagonal>, RunError> {
        let invalid = |e: Error| RunError::InvalidConfig(e.to_string());
        match self.diagonal.as_deref().map(str::trim) {
            None | Some("all") => Diagonal::representatives(self.n).map_err(invalid),
            Some(text) => {
                let t = Diagonal::parse(self.n, text).map_err(invalid)?;
                Ok(vec![canonical_diagonal(t.permutation())])
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("solver failure on diagonal {diagonal}: {source}")]
    Solver {
        diagonal: String,
        #[source]
        source: SolverError,
    },
    #[error("minimality check failure on diagonal {diagonal}: {source}")]
    Check {
        diagonal: String,
        #[source]
        source: Error,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub minimal: u64,
    pub witness: u64,
    pub propagate: u64,
    pub unknown: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.minimal + self.witness + self.propagate + self.unknown
    }

    fn record(&mut self, outcome: &MinCheckOutcome) {
        match outcome {
            MinCheckOutcome::Minimal => self.minimal += 1,
            MinCheckOutcome::Witness { .. } => self.witness += 1,
            MinCheckOutcome::Propagate { .. } => self.propagate += 1,
            MinCheckOutcome::Unknown => self.unknown += 1,
        }
    }
}

/// Seconds spent in minimality checks, split by result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckTimes {
    /// Partial checks that added a clause.
    pub partial_clause: f64,
    /// Partial checks without a conclusion.
    pub partial_no_conclusion: f64,
    pub complete_non_minimal: f64,
    pub complete_minimal: f64,
}

impl CheckTimes {
    pub fn sum(&self) -> f64 {
        self.partial_clause + self.partial_no_conclusion + self.complete_non_minimal + self.complete_minimal
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagonalStats {
    pub cycle_type: Vec<usize>,
    pub solutions: u64,
    pub partial_checks: u64,
    pub complete_checks: u64,
    pub partial_outcomes: OutcomeCounts,
    pub complete_outcomes: OutcomeCounts,
    pub times: CheckTimes,
    pub total_time: f64,
    pub decisions: u64,
    pub conflicts: u64,
    pub external_clauses: u64,
}

/// Statistics of a run, keyed by diagonal in cycle notation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Stats {
    pub diagonals: BTreeMap<String, DiagonalStats>,
}

impl Stats {
    pub fn total_solutions(&self) -> u64 {
        self.diagonals.values().map(|d| d.solutions).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Stats> {
        serde_json::from_str(text)
    }

    /// Rows ordered by cycle type, largest parts first.
    fn rows(&self) -> Vec<(&String, &DiagonalStats)> {
        let mut rows: Vec<_> = self.diagonals.iter().collect();
        rows.sort_by(|a, b| b.1.cycle_type.cmp(&a.1.cycle_type).then_with(|| a.0.cmp(b.0)));
        rows
    }

    /// Per-diagonal solution counts and the share of time spent in each
    /// check category.
    pub fn report_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<28} {:>10} {:>10} {:>12} {:>10} {:>12} {:>10} {:>10}",
            "diagonal", "solutions", "time (s)", "partial+cl", "partial", "complete-nm", "complete", "checks %"
        );
        let pct = |x: f64, total: f64| if total > 0.0 { 100.0 * x / total } else { 0.0 };
        for (name, d) in self.rows() {
            let t = &d.times;
            let _ = writeln!(
                out,
                "{:<28} {:>10} {:>10.2} {:>11.1}% {:>9.1}% {:>11.1}% {:>9.1}% {:>9.1}%",
                name,
                d.solutions,
                d.total_time,
                pct(t.partial_clause, d.total_time),
                pct(t.partial_no_conclusion, d.total_time),
                pct(t.complete_non_minimal, d.total_time),
                pct(t.complete_minimal, d.total_time),
                pct(t.sum(), d.total_time),
            );
        }
        if !self.diagonals.is_empty() {
            let total_time: f64 = self.diagonals.values().map(|d| d.total_time).sum();
            let _ = writeln!(
                out,
                "{:<28} {:>10} {:>10.2}",
                "total",
                self.total_solutions(),
                total_time
            );
        }
        out
    }
}

/// Result of enumerating one diagonal.
#[derive(Debug, Clone)]
pub struct DiagonalRun {
    pub diagonal: Diagonal,
    /// Solutions in the order the solver found them.
    pub solutions: Vec<CycleSet>,
    pub stats: DiagonalStats,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// One entry per selected diagonal, in partition order.
    pub runs: Vec<DiagonalRun>,
}

impl RunOutput {
    pub fn sorted_solutions(&self) -> Vec<CycleSet> {
        let mut all = self.raw_solutions();
        all.sort();
        all
    }

    /// Solutions diagonal by diagonal, in solver order.
    pub fn raw_solutions(&self) -> Vec<CycleSet> {
        self.runs.iter().flat_map(|r| r.solutions.iter().cloned()).collect()
    }

    pub fn stats(&self) -> Stats {
        Stats {
            diagonals: self
                .runs
                .iter()
                .map(|r| (r.diagonal.to_string(), r.stats.clone()))
                .collect(),
        }
    }
}

enum Checker {
    Backtrack(BacktrackChecker),
    Incremental {
        complete: Box<OracleInstance>,
        partial: Box<OracleInstance>,
    },
}

impl Checker {
    fn check(&mut self, p: &PartialCycleSet, complete: bool, limit: u64) -> crate::Result<MinCheckOutcome> {
        match self {
            Checker::Backtrack(b) => {
                let budget = (!complete).then_some(SearchBudget { max_nodes: limit });
                b.check(p, budget, complete)
            }
            Checker::Incremental { complete: inst, .. } if complete => inst.check(p, None),
            Checker::Incremental { partial, .. } => partial.check(p, Some(limit)),
        }
    }
}

/// Rejects every assignment that a diagonal-preserving permutation lowers.
struct MinimalityHooks<'a> {
    varmap: &'a VarMap,
    checker: Checker,
    limit: u64,
    stats: DiagonalStats,
    error: Option<Error>,
}

impl MinimalityHooks<'_> {
    fn fail(&mut self, e: Error) -> Option<Vec<Lit>> {
        self.error.get_or_insert(e);
        None
    }

    fn clause_for(&self, p: &PartialCycleSet, outcome: &MinCheckOutcome) -> crate::Result<Option<Vec<Lit>>> {
        match outcome {
            MinCheckOutcome::Witness { pi, cell } => {
                let clause = breaking_clause(p, pi, *cell, self.varmap)?;
                Ok(Some(optimize_clause(&clause, self.varmap)))
            }
            MinCheckOutcome::Propagate { pi, cell, eliminate } => {
                match propagation_clause(p, pi, *cell, *eliminate, self.varmap) {
                    Ok(clause) => Ok(Some(clause)),
                    Err(Error::NotPropagating) => Ok(None),
                    Err(e) => Err(e),
                }
            }
            MinCheckOutcome::Minimal | MinCheckOutcome::Unknown => Ok(None),
        }
    }
}

impl ExternalPropagator for MinimalityHooks<'_> {
    fn propagate_partial(&mut self, assignment: Assignment<'_>) -> Option<Vec<Lit>> {
        if self.error.is_some() {
            return None;
        }
        let start = Instant::now();
        let p = match self.varmap.extract_partial(assignment) {
            Ok(p) => p,
            Err(e) => return self.fail(e),
        };
        let outcome = match self.checker.check(&p, false, self.limit) {
            Ok(o) => o,
            Err(e) => return self.fail(e),
        };
        let clause = match self.clause_for(&p, &outcome) {
            Ok(c) => c,
            Err(e) => return self.fail(e),
        };
        self.stats.partial_checks += 1;
        self.stats.partial_outcomes.record(&outcome);
        let elapsed = start.elapsed().as_secs_f64();
        if clause.is_some() {
            self.stats.times.partial_clause += elapsed;
        } else {
            self.stats.times.partial_no_conclusion += elapsed;
        }
        clause
    }

    fn check_model(&mut self, model: Assignment<'_>) -> Option<Vec<Lit>> {
        if self.error.is_some() {
            return None;
        }
        let start = Instant::now();
        let c = match self.varmap.decode_model(model) {
            Ok(c) => c,
            Err(e) => return self.fail(e),
        };
        let p = c.to_partial();
        let outcome = match self.checker.check(&p, true, self.limit) {
            Ok(o) => o,
            Err(e) => return self.fail(e),
        };
        self.stats.complete_checks += 1;
        self.stats.complete_outcomes.record(&outcome);
        let clause = match outcome {
            MinCheckOutcome::Minimal => None,
            MinCheckOutcome::Witness { .. } => match self.clause_for(&p, &outcome) {
                Ok(c) => c,
                Err(e) => return self.fail(e),
            },
            other => return self.fail(Error::ShapeMismatch(format!("complete check returned {other:?}"))),
        };
        let elapsed = start.elapsed().as_secs_f64();
        if clause.is_some() {
            self.stats.times.complete_non_minimal += elapsed;
        } else {
            self.stats.times.complete_minimal += elapsed;
        }
        clause
    }
}

/// Enumerates the lex-minimal cycle sets with diagonal `t`.
pub fn enumerate_diagonal(t: &Diagonal, config: &RunConfig) -> Result<DiagonalRun, RunError> {
    let start = Instant::now();
    let name = t.to_string();
    let enc = encode_axioms(t, config.eo);
    let mut solver = Solver::new(SolverConfig {
        partial_check_interval: config.freq,
        prefix_phase: Some(true),
        seed: config.seed,
        ..SolverConfig::default()
    });
    solver.ensure_vars(enc.cnf.num_vars);
    for clause in &enc.cnf.clauses {
        solver.add_clause(clause);
    }
    let prefix: Vec<_> = enc.varmap.matrix_vars().collect();
    solver.set_branch_prefix(&prefix);

    let checker = match config.backend {
        Backend::Backtrack => Checker::Backtrack(BacktrackChecker::new(t)),
        Backend::Incremental => Checker::Incremental {
            complete: Box::new(OracleInstance::build_with(
                OracleKind::Complete,
                t,
                config.eo,
                config.seed,
            )),
            partial: Box::new(OracleInstance::build_with(
                OracleKind::Partial,
                t,
                config.eo,
                config.seed,
            )),
        },
    };
    let mut hooks = MinimalityHooks {
        varmap: &enc.varmap,
        checker,
        limit: config.limit,
        stats: DiagonalStats {
            cycle_type: t.cycle_type(),
            ..DiagonalStats::default()
        },
        error: None,
    };

    let mut solutions = Vec::new();
    let mut decode_error = None;
    let result = solver.enumerate(&mut hooks, |model| match enc.varmap.decode_model(model) {
        Ok(c) => {
            let block = blocking_clause(&c, &enc.varmap);
            solutions.push(c);
            Some(block)
        }
        Err(e) => {
            decode_error = Some(e);
            None
        }
    });
    result.map_err(|source| RunError::Solver {
        diagonal: name.clone(),
        source,
    })?;
    if let Some(source) = hooks.error.take().or(decode_error) {
        return Err(RunError::Check { diagonal: name, source });
    }

    let mut stats = hooks.stats;
    let engine = solver.stats();
    stats.solutions = solutions.len() as u64;
    stats.decisions = engine.decisions;
    stats.conflicts = engine.conflicts;
    stats.external_clauses = engine.external_clauses;
    stats.total_time = start.elapsed().as_secs_f64();
    info!(
        "diagonal {name}: {} solutions, {} partial / {} complete checks, {:.2}s",
        stats.solutions, stats.partial_checks, stats.complete_checks, stats.total_time
    );
    debug!("diagonal {name}: {stats:?}");
    Ok(DiagonalRun {
        diagonal: t.clone(),
        solutions,
        stats,
    })
}

/// Enumerates every selected diagonal, with up to `workers` diagonals in
/// flight at once.
pub fn run(config: &RunConfig) -> Result<RunOutput, RunError> {
    config.validate()?;
    let diagonals = config.diagonals()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| RunError::InvalidConfig(e.to_string()))?;
    let runs = pool.install(|| {
        diagonals
            .par_iter()
            .map(|t| enumerate_diagonal(t, config))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(RunOutput { runs })
}
