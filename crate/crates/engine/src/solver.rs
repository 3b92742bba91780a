//! Conflict-driven clause-learning search.
//!
//! The solver follows the usual MiniSat layout: two watched literals with
//! blockers, first-UIP learning with local minimization, VSIDS with phase
//! saving, Luby restarts and LBD-based deletion of learnt clauses. On top of
//! that it supports
//!
//! - incremental solving under assumptions, with a failed-assumption core,
//! - an [`ExternalPropagator`] consulted on partial and complete assignments,
//!   whose clauses are installed permanently,
//! - model enumeration with caller-supplied blocking clauses,
//! - a static branching prefix (variables decided in a fixed order before
//!   the activity heap is consulted).

use log::{debug, trace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::heap::VarHeap;
use crate::types::{Assignment, LBool, Lit, Var};

type ClauseRef = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("external clause {clause:?} is {reason}")]
    PropagatorContractViolation { clause: Vec<i32>, reason: &'static str },
    #[error("literal {0} refers to an unknown variable")]
    UnknownVariable(i32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    /// The formula is unsatisfiable under the given assumptions. `core` is a
    /// subset of the assumptions that is already unsatisfiable together with
    /// the clause database.
    Unsat {
        core: Vec<Lit>,
    },
    /// The conflict budget ran out.
    Unknown,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat)
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat { .. })
    }
}

/// How an enumeration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationEnd {
    /// All models were visited.
    Exhausted,
    /// The model callback asked to stop.
    Stopped,
}

/// Callbacks consulted by the search.
///
/// Clauses returned from either hook must be falsified or unit under the
/// current assignment; anything else is reported as
/// [`SolverError::PropagatorContractViolation`]. Returned clauses are never
/// deleted.
pub trait ExternalPropagator {
    /// Called before a decision, every `partial_check_interval`-th time.
    fn propagate_partial(&mut self, _assignment: Assignment<'_>) -> Option<Vec<Lit>> {
        None
    }

    /// Called on every complete assignment before it is accepted as a model.
    fn check_model(&mut self, model: Assignment<'_>) -> Option<Vec<Lit>>;
}

/// Accepts every model.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoPropagator;

impl ExternalPropagator for NoPropagator {
    fn check_model(&mut self, _model: Assignment<'_>) -> Option<Vec<Lit>> {
        None
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Conflicts per Luby unit.
    pub restart_base: u64,
    pub first_reduce: usize,
    pub reduce_increment: usize,
    /// Call [`ExternalPropagator::propagate_partial`] on every n-th decision;
    /// 0 disables partial checks.
    pub partial_check_interval: u32,
    /// Phase used for variables of the static branching prefix; `None` uses
    /// the saved phase.
    pub prefix_phase: Option<bool>,
    /// Seeds the tiny initial activity perturbation.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            var_decay: 0.95,
            clause_decay: 0.999,
            restart_base: 100,
            first_reduce: 2000,
            reduce_increment: 300,
            partial_check_interval: 0,
            prefix_phase: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnt_clauses: u64,
    pub deleted_clauses: u64,
    pub external_clauses: u64,
    pub partial_calls: u64,
    pub model_calls: u64,
}

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: ClauseRef,
    blocker: Lit,
}

enum Status {
    Sat,
    Unsat,
    Unknown,
}

const NO_RANK: u32 = u32::MAX;

pub struct Solver {
    config: SolverConfig,
    ok: bool,

    clauses: Vec<ClauseData>,
    free_slots: Vec<ClauseRef>,
    learnts: Vec<ClauseRef>,
    watches: Vec<Vec<Watcher>>,

    assigns: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f32,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,

    prefix: Vec<Var>,
    prefix_rank: Vec<u32>,
    prefix_hint: usize,

    assumptions: Vec<Lit>,
    core: Vec<Lit>,
    model: Vec<LBool>,

    max_learnts: usize,
    luby_index: u32,
    decision_calls: u64,
    rng: ChaCha8Rng,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverConfig::default())
    }
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        let max_learnts = config.first_reduce;
        Solver {
            config,
            ok: true,
            clauses: Vec::new(),
            free_slots: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            prefix: Vec::new(),
            prefix_rank: Vec::new(),
            prefix_hint: 0,
            assumptions: Vec::new(),
            core: Vec::new(),
            model: Vec::new(),
            max_learnts,
            luby_index: 0,
            decision_calls: 0,
            rng,
            stats: SolverStats::default(),
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    /// Number of clauses currently stored (original, external and learnt).
    pub fn num_clauses(&self) -> usize {
        self.clauses.len() - self.free_slots.len()
    }

    /// False once the clause database is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.assigns.push(LBool::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(self.rng.gen::<f64>() * 1e-6);
        self.phase.push(false);
        self.seen.push(false);
        self.prefix_rank.push(NO_RANK);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.heap.insert(v.index(), &self.activity);
        v
    }

    /// Makes sure variables `0..n` exist.
    pub fn ensure_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    /// Variables in `order` are decided first, in that order.
    pub fn set_branch_prefix(&mut self, order: &[Var]) {
        for &v in &self.prefix {
            self.prefix_rank[v.index()] = NO_RANK;
        }
        self.prefix = order.to_vec();
        for (i, &v) in self.prefix.iter().enumerate() {
            self.prefix_rank[v.index()] = i as u32;
        }
        self.prefix_hint = 0;
    }

    #[inline]
    fn value(&self, l: Lit) -> LBool {
        let v = self.assigns[l.var().index()];
        if l.is_positive() {
            v
        } else {
            !v
        }
    }

    #[inline]
    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Value of `l` in the last model found.
    pub fn model_value(&self, l: Lit) -> LBool {
        match self.model.get(l.var().index()) {
            Some(&v) if l.is_positive() => v,
            Some(&v) => !v,
            None => LBool::Undef,
        }
    }

    pub fn model(&self) -> Assignment<'_> {
        Assignment::new(&self.model)
    }

    /// Adds a permanent clause at the root level. Returns false when the
    /// database became unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let mut c: Vec<Lit> = lits.to_vec();
        for l in &c {
            self.ensure_vars(l.var().index() + 1);
        }
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        if c.iter().any(|&l| self.value(l).is_true()) {
            return true;
        }
        c.retain(|&l| !self.value(l).is_false());
        match c.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(c, false, 0);
                true
            }
        }
    }

    fn alloc(&mut self, data: ClauseData) -> ClauseRef {
        if let Some(slot) = self.free_slots.pop() {
            self.clauses[slot as usize] = data;
            slot
        } else {
            self.clauses.push(data);
            (self.clauses.len() - 1) as ClauseRef
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> ClauseRef {
        debug_assert!(lits.len() >= 2);
        let (l0, l1) = (lits[0], lits[1]);
        let cref = self.alloc(ClauseData {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        self.watches[l0.code()].push(Watcher { cref, blocker: l1 });
        self.watches[l1.code()].push(Watcher { cref, blocker: l0 });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    #[inline]
    fn enqueue(&mut self, l: Lit, reason: Option<ClauseRef>) {
        let v = l.var().index();
        debug_assert!(self.assigns[v].is_undef());
        self.assigns[v] = LBool::from_bool(l.is_positive());
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn new_decision_level(&mut self) {
        self.trail_lim.push(self.trail.len());
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.assigns[v] = LBool::Undef;
            self.reason[v] = None;
            self.phase[v] = l.is_positive();
            self.heap.insert(v, &self.activity);
            let rank = self.prefix_rank[v];
            if rank != NO_RANK && (rank as usize) < self.prefix_hint {
                self.prefix_hint = rank as usize;
            }
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level);
        self.qhead = start;
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<ClauseRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker).is_true() {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let first;
                {
                    let lits = &mut self.clauses[cref as usize].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                    first = lits[0];
                }
                if first != w.blocker && self.value(first).is_true() {
                    ws[j] = Watcher { cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref as usize].lits.len();
                for k in 2..len {
                    let lk = self.clauses[cref as usize].lits[k];
                    if !self.value(lk).is_false() {
                        let lits = &mut self.clauses[cref as usize].lits;
                        lits.swap(1, k);
                        self.watches[lk.code()].push(Watcher { cref, blocker: first });
                        continue 'watchers;
                    }
                }
                ws[j] = Watcher { cref, blocker: first };
                j += 1;
                if self.value(first).is_false() {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, a literal of the backjump level second) and the
    /// backjump level.
    fn analyze(&mut self, mut confl: ClauseRef) -> (Vec<Lit>, usize) {
        let current = self.decision_level() as u32;
        let mut learnt = vec![Lit::new(Var(0), true)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            let len = self.clauses[confl as usize].lits.len();
            for k in start..len {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            let v = lit.var().index();
            self.seen[v] = false;
            p = Some(lit);
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[v].expect("implied literal without reason");
        }
        learnt[0] = !p.unwrap();

        // local minimization: drop literals implied by the rest of the clause
        let mut keep = vec![true; learnt.len()];
        for (i, &l) in learnt.iter().enumerate().skip(1) {
            if let Some(r) = self.reason[l.var().index()] {
                let redundant = self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let qv = q.var().index();
                    self.seen[qv] || self.level[qv] == 0
                });
                if redundant {
                    keep[i] = false;
                }
            }
        }
        for l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        let mut out: Vec<Lit> = learnt.iter().zip(&keep).filter(|(_, &k)| k).map(|(&l, _)| l).collect();

        let bt = if out.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            self.level[out[1].var().index()] as usize
        };
        (out, bt)
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var().index()]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn learn_from_conflict(&mut self, confl: ClauseRef) {
        let (learnt, bt) = self.analyze(confl);
        trace!(
            "conflict at level {}: learnt {:?}, backjump to {}",
            self.decision_level(),
            learnt,
            bt
        );
        let lbd = self.lbd(&learnt);
        self.cancel_until(bt);
        if learnt.len() == 1 {
            self.enqueue(learnt[0], None);
        } else {
            let asserting = learnt[0];
            let cref = self.attach(learnt, true, lbd);
            self.stats.learnt_clauses += 1;
            self.enqueue(asserting, Some(cref));
        }
        self.var_inc /= self.config.var_decay;
        self.clause_inc /= self.config.clause_decay as f32;
    }

    /// Computes the subset of assumptions responsible for `failed` being false.
    fn analyze_final(&mut self, failed: Lit) {
        self.core.clear();
        self.core.push(failed);
        if self.decision_level() == 0 {
            return;
        }
        let fv = failed.var().index();
        if self.level[fv] == 0 {
            return;
        }
        self.seen[fv] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => {
                    if l != !failed {
                        self.core.push(l);
                    } else {
                        // both polarities were assumed
                        self.core.push(l);
                    }
                }
                Some(r) => {
                    for k in 1..self.clauses[r as usize].lits.len() {
                        let q = self.clauses[r as usize].lits[k].var().index();
                        if self.level[q] > 0 {
                            self.seen[q] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[fv] = false;
        self.core.dedup();
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        let l0 = self.clauses[cref as usize].lits[0];
        self.reason[l0.var().index()] == Some(cref) && self.value(l0).is_true()
    }

    fn reduce_db(&mut self) {
        let mut candidates: Vec<ClauseRef> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.clauses[c as usize].lbd > 2 && !self.locked(c))
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(
                ca.activity
                    .partial_cmp(&cb.activity)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
        });
        let remove = candidates.len() / 2;
        for &c in &candidates[..remove] {
            self.clauses[c as usize].deleted = true;
        }
        if remove > 0 {
            for ws in &mut self.watches {
                ws.retain(|w| !self.clauses[w.cref as usize].deleted);
            }
            let clauses = &mut self.clauses;
            let free = &mut self.free_slots;
            self.learnts.retain(|&c| {
                if clauses[c as usize].deleted {
                    clauses[c as usize].lits = Vec::new();
                    free.push(c);
                    false
                } else {
                    true
                }
            });
        }
        self.stats.deleted_clauses += remove as u64;
        self.max_learnts += self.config.reduce_increment;
        debug!(
            "reduce: removed {} learnt clauses, {} remain",
            remove,
            self.learnts.len()
        );
    }

    fn pick_branch_lit(&mut self) -> Option<Lit> {
        while self.prefix_hint < self.prefix.len() {
            let v = self.prefix[self.prefix_hint];
            if self.assigns[v.index()].is_undef() {
                let polarity = self.config.prefix_phase.unwrap_or(self.phase[v.index()]);
                return Some(Lit::new(v, polarity));
            }
            self.prefix_hint += 1;
        }
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v].is_undef() {
                return Some(Lit::new(Var(v as u32), self.phase[v]));
            }
        }
        None
    }

    /// Installs a clause produced by a propagator or enumeration callback
    /// while the search is in progress.
    fn add_clause_in_search(&mut self, lits: Vec<Lit>) -> Result<(), SolverError> {
        let mut c = lits;
        c.sort_unstable();
        c.dedup();
        let dimacs = |c: &[Lit]| c.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>();
        for l in &c {
            if l.var().index() >= self.num_vars() {
                return Err(SolverError::UnknownVariable(l.to_dimacs()));
            }
        }
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return Err(SolverError::PropagatorContractViolation {
                clause: dimacs(&c),
                reason: "tautological",
            });
        }
        let mut undef = Vec::new();
        for &l in &c {
            match self.value(l) {
                LBool::True => {
                    return Err(SolverError::PropagatorContractViolation {
                        clause: dimacs(&c),
                        reason: "satisfied under the current assignment",
                    })
                }
                LBool::Undef => undef.push(l),
                LBool::False => {}
            }
        }
        if undef.len() > 1 {
            return Err(SolverError::PropagatorContractViolation {
                clause: dimacs(&c),
                reason: "neither falsified nor unit",
            });
        }
        self.stats.external_clauses += 1;

        if c.is_empty() {
            self.ok = false;
            return Ok(());
        }
        if c.len() == 1 {
            self.cancel_until(0);
            match self.value(c[0]) {
                LBool::False => self.ok = false,
                LBool::Undef => self.enqueue(c[0], None),
                LBool::True => {}
            }
            return Ok(());
        }

        if let Some(&u) = undef.first() {
            // unit: the open literal goes first, the deepest false literal second
            let pos = c.iter().position(|&l| l == u).unwrap();
            c.swap(0, pos);
            let mut max_i = 1;
            for i in 2..c.len() {
                if self.level[c[i].var().index()] > self.level[c[max_i].var().index()] {
                    max_i = i;
                }
            }
            c.swap(1, max_i);
            let bt = self.level[c[1].var().index()] as usize;
            self.cancel_until(bt);
            let cref = self.attach(c, false, 0);
            self.enqueue(u, Some(cref));
            return Ok(());
        }

        // falsified
        c.sort_by_key(|l| std::cmp::Reverse(self.level[l.var().index()]));
        let top = self.level[c[0].var().index()];
        if top == 0 {
            self.ok = false;
            return Ok(());
        }
        let second = self.level[c[1].var().index()];
        if second < top {
            self.cancel_until(second as usize);
            let asserting = c[0];
            let cref = self.attach(c, false, 0);
            self.enqueue(asserting, Some(cref));
        } else {
            self.cancel_until(top as usize);
            let cref = self.attach(c, false, 0);
            self.stats.conflicts += 1;
            self.learn_from_conflict(cref);
        }
        Ok(())
    }

    fn search(
        &mut self,
        mut prop: Option<&mut dyn ExternalPropagator>,
        conflict_budget: Option<u64>,
    ) -> Result<Status, SolverError> {
        let start_conflicts = self.stats.conflicts;
        let mut restart_limit = luby(2.0, self.luby_index) * self.config.restart_base as f64;
        let mut since_restart = 0u64;
        loop {
            if !self.ok {
                return Ok(Status::Unsat);
            }
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Ok(Status::Unsat);
                }
                self.learn_from_conflict(confl);
                continue;
            }
            if let Some(b) = conflict_budget {
                if self.stats.conflicts - start_conflicts >= b {
                    return Ok(Status::Unknown);
                }
            }
            if since_restart as f64 >= restart_limit {
                self.stats.restarts += 1;
                self.luby_index += 1;
                restart_limit = luby(2.0, self.luby_index) * self.config.restart_base as f64;
                since_restart = 0;
                debug!(
                    "restart #{} after {} conflicts",
                    self.stats.restarts, self.stats.conflicts
                );
                self.cancel_until(0);
                continue;
            }
            if self.learnts.len() >= self.max_learnts + self.trail.len() {
                self.reduce_db();
            }

            let mut next = None;
            while self.decision_level() < self.assumptions.len() {
                let a = self.assumptions[self.decision_level()];
                match self.value(a) {
                    LBool::True => self.new_decision_level(),
                    LBool::False => {
                        self.analyze_final(a);
                        return Ok(Status::Unsat);
                    }
                    LBool::Undef => {
                        next = Some(a);
                        break;
                    }
                }
            }

            if next.is_none() {
                let interval = self.config.partial_check_interval as u64;
                if interval > 0 && self.trail.len() < self.num_vars() {
                    if let Some(p) = prop.as_deref_mut() {
                        self.decision_calls += 1;
                        if self.decision_calls.is_multiple_of(interval) {
                            self.stats.partial_calls += 1;
                            if let Some(clause) = p.propagate_partial(Assignment::new(&self.assigns)) {
                                self.add_clause_in_search(clause)?;
                                continue;
                            }
                        }
                    }
                }
                next = self.pick_branch_lit();
                if next.is_none() {
                    if let Some(p) = prop.as_deref_mut() {
                        self.stats.model_calls += 1;
                        if let Some(clause) = p.check_model(Assignment::new(&self.assigns)) {
                            self.add_clause_in_search(clause)?;
                            continue;
                        }
                    }
                    self.model.clone_from(&self.assigns);
                    return Ok(Status::Sat);
                }
                self.stats.decisions += 1;
            }
            self.new_decision_level();
            self.enqueue(next.unwrap(), None);
        }
    }

    fn solve_internal(
        &mut self,
        assumptions: &[Lit],
        conflict_budget: Option<u64>,
        prop: Option<&mut dyn ExternalPropagator>,
    ) -> Result<SolveResult, SolverError> {
        self.cancel_until(0);
        self.core.clear();
        for a in assumptions {
            if a.var().index() >= self.num_vars() {
                return Err(SolverError::UnknownVariable(a.to_dimacs()));
            }
        }
        self.assumptions = assumptions.to_vec();
        let status = self.search(prop, conflict_budget);
        self.assumptions.clear();
        Ok(match status? {
            Status::Sat => SolveResult::Sat,
            Status::Unsat => SolveResult::Unsat {
                core: std::mem::take(&mut self.core),
            },
            Status::Unknown => {
                self.cancel_until(0);
                SolveResult::Unknown
            }
        })
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        self.solve_internal(assumptions, None, None)
            .expect("no propagator attached")
    }

    /// Like [`Solver::solve`], giving up after `conflict_budget` conflicts.
    pub fn solve_limited(&mut self, assumptions: &[Lit], conflict_budget: Option<u64>) -> SolveResult {
        self.solve_internal(assumptions, conflict_budget, None)
            .expect("no propagator attached")
    }

    pub fn solve_with(
        &mut self,
        assumptions: &[Lit],
        conflict_budget: Option<u64>,
        prop: &mut dyn ExternalPropagator,
    ) -> Result<SolveResult, SolverError> {
        self.solve_internal(assumptions, conflict_budget, Some(prop))
    }

    /// Enumerates models accepted by `prop`.
    ///
    /// After each accepted model `on_model` is called; it returns the
    /// blocking clause to install (which must be falsified by the model), or
    /// `None` to stop. Search continues from the current trail instead of
    /// restarting from the root.
    pub fn enumerate<F>(
        &mut self,
        prop: &mut dyn ExternalPropagator,
        mut on_model: F,
    ) -> Result<EnumerationEnd, SolverError>
    where
        F: FnMut(Assignment<'_>) -> Option<Vec<Lit>>,
    {
        self.cancel_until(0);
        self.assumptions.clear();
        loop {
            match self.search(Some(&mut *prop), None)? {
                Status::Sat => {
                    let Some(block) = on_model(Assignment::new(&self.model)) else {
                        return Ok(EnumerationEnd::Stopped);
                    };
                    self.add_clause_in_search(block)?;
                }
                Status::Unsat => return Ok(EnumerationEnd::Exhausted),
                Status::Unknown => unreachable!("enumeration runs without a budget"),
            }
        }
    }
}

/// The Luby sequence scaled by `y`: 1, 1, 2, 1, 1, 2, 4, ...
fn luby(y: f64, mut x: u32) -> f64 {
    let mut size = 1u32;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}
