//! Brute-force checks shared by the integration tests and the acceptance
//! harness. Each check returns a short summary or the first failure.

#![allow(dead_code)]

use cyclesat::backtrack::BacktrackChecker;
use cyclesat::cycleset::{
    apply_permutation, apply_to_cycle_set, domain_leq, extensions, strictly_below, Cell, CycleSet, Domain,
    PartialCycleSet, Permutation,
};
use cyclesat::encoding::{encode_axioms, EoMethod, VarMap};
use cyclesat::incremental::{OracleInstance, OracleKind};
use cyclesat::learning::{breaking_clause, optimize_clause, propagation_clause};
use cyclesat::mincheck::MinCheckOutcome;
use cyclesat::oracle::{brute_force_diagonal, lowering_permutation};
use cyclesat::symmetry::{fixes_diagonal, Diagonal};
use cyclesat_engine::Lit;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

/// Every matrix whose cells take values from the domains of `p`, as
/// row-major value vectors (no axioms imposed).
pub fn completions(p: &PartialCycleSet) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for d in p.domains() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                d.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

/// `P ⊴ P'`: strictly below somewhere, or below on every cell.
pub fn leq(p: &PartialCycleSet, q: &PartialCycleSet) -> bool {
    strictly_below(p, q).is_some() || p.domains().iter().zip(q.domains()).all(|(&a, &b)| domain_leq(a, b))
}

/// The three partial-order properties for one pair.
pub fn partial_order_pair(p: &PartialCycleSet, q: &PartialCycleSet) -> Result<(), String> {
    let strict = strictly_below(p, q).is_some();
    let below = leq(p, q);
    if strict || below {
        let xs = completions(p);
        let ys = completions(q);
        for x in &xs {
            for y in &ys {
                if strict && x >= y {
                    return Err(format!("strictly below but {x:?} >= {y:?} ({p:?} vs {q:?})"));
                }
                if x > y {
                    return Err(format!("below but {x:?} > {y:?} ({p:?} vs {q:?})"));
                }
            }
        }
    }
    if below && leq(q, p) && !(p == q && p.is_complete()) {
        return Err(format!("mutually below but not equal and complete: {p:?} vs {q:?}"));
    }
    Ok(())
}

fn nonempty_subsets(n: usize) -> Vec<Domain> {
    (1u32..(1 << n)).map(Domain).collect()
}

/// All pairs at size 2, and at size 3 all pairs differing from a common
/// base only in a window of two consecutive cells.
pub fn partial_order_exhaustive() -> Check {
    let mut pairs = 0u64;
    let subsets = nonempty_subsets(2);
    let all2: Vec<PartialCycleSet> = (0..subsets.len().pow(4))
        .map(|mut code| {
            let domains = (0..4)
                .map(|_| {
                    let d = subsets[code % subsets.len()];
                    code /= subsets.len();
                    d
                })
                .collect();
            PartialCycleSet::new(2, domains).unwrap()
        })
        .collect();
    for p in &all2 {
        for q in &all2 {
            partial_order_pair(p, q)?;
            pairs += 1;
        }
    }

    let subsets = nonempty_subsets(3);
    for base_value in 0..3 {
        for start in 0..8 {
            let windows: Vec<(Domain, Domain)> = subsets
                .iter()
                .flat_map(|&a| subsets.iter().map(move |&b| (a, b)))
                .collect();
            for &(a, b) in &windows {
                for &(c, d) in &windows {
                    let mut pd = vec![Domain::single(base_value); 9];
                    let mut qd = pd.clone();
                    pd[start] = a;
                    pd[start + 1] = b;
                    qd[start] = c;
                    qd[start + 1] = d;
                    let p = PartialCycleSet::new(3, pd).unwrap();
                    let q = PartialCycleSet::new(3, qd).unwrap();
                    partial_order_pair(&p, &q)?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

pub fn random_partial(n: usize, rng: &mut ChaCha8Rng) -> PartialCycleSet {
    let domains = (0..n * n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Domain::single(rng.gen_range(0..n))
            } else {
                loop {
                    let d = Domain(rng.gen_range(1u32..(1 << n)));
                    if !d.is_empty() {
                        break d;
                    }
                }
            }
        })
        .collect();
    PartialCycleSet::new(n, domains).unwrap()
}

/// A random partner of `p` that shares a prefix, so that comparisons are
/// decided late rather than at the first cell.
pub fn random_partner(p: &PartialCycleSet, rng: &mut ChaCha8Rng) -> PartialCycleSet {
    let n = p.n();
    let keep = rng.gen_range(0..=n * n);
    let fresh = random_partial(n, rng);
    let domains = (0..n * n)
        .map(|i| if i < keep { p.domains()[i] } else { fresh.domains()[i] })
        .collect();
    PartialCycleSet::new(n, domains).unwrap()
}

/// Randomized pairs at size `n`; completions are sampled when too many.
pub fn partial_order_random(n: usize, cases: usize, rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..cases {
        let p = random_partial(n, rng);
        let q = random_partner(&p, rng);
        let strict = strictly_below(&p, &q).is_some();
        let below = leq(&p, &q);
        if strict || below {
            for _ in 0..50 {
                let x = sample_completion(&p, rng);
                let y = sample_completion(&q, rng);
                if (strict && x >= y) || x > y {
                    return Err(format!("order violated: {x:?} vs {y:?} from {p:?} / {q:?}"));
                }
            }
        }
        if below && leq(&q, &p) && !(p == q && p.is_complete()) {
            return Err(format!("mutually below but not equal and complete: {p:?} vs {q:?}"));
        }
    }
    Ok(format!("{cases} random pairs at size {n}"))
}

fn sample_completion(p: &PartialCycleSet, rng: &mut ChaCha8Rng) -> Vec<usize> {
    p.domains()
        .iter()
        .map(|d| {
            let vals: Vec<usize> = d.iter().collect();
            *vals.choose(rng).unwrap()
        })
        .collect()
}

/// Both minimality checks against an exhaustive centralizer search, for
/// every cycle set of size `n ≤ 5`: all `n!` diagonals, not only the class
/// representatives.
pub fn mincheck_agreement(n: usize) -> Check {
    let mut checked = 0;
    for t in Permutation::all(n).into_iter().map(Diagonal::from_permutation) {
        let mut backtrack = BacktrackChecker::new(&t);
        let mut incremental = OracleInstance::build(OracleKind::Complete, &t);
        for c in brute_force_diagonal(&t).unwrap() {
            let minimal = lowering_permutation(&c, &t).is_none();
            let p = c.to_partial();
            let outcomes = [
                ("backtrack", backtrack.check(&p, None, true).unwrap()),
                ("incremental", incremental.check(&p, None).unwrap()),
            ];
            for (name, outcome) in outcomes {
                match outcome {
                    MinCheckOutcome::Minimal if minimal => {}
                    MinCheckOutcome::Witness { pi, cell } if !minimal => {
                        if !fixes_diagonal(&pi, &t) {
                            return Err(format!("{name}: witness {pi} moves the diagonal of {}", c.to_line()));
                        }
                        if apply_to_cycle_set(&pi, &c) >= c {
                            return Err(format!("{name}: {pi} does not lower {}", c.to_line()));
                        }
                        if strictly_below(&apply_permutation(&pi, &p), &p) != Some(cell) {
                            return Err(format!("{name}: wrong strict cell {cell} for {}", c.to_line()));
                        }
                    }
                    other => {
                        return Err(format!(
                            "{name}: {other:?} on {} (brute force says minimal = {minimal})",
                            c.to_line()
                        ))
                    }
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} cycle sets at size {n}"))
}

/// Truth value of `clause` on the complete matrix `c`.
pub fn eval_clause(clause: &[Lit], varmap: &VarMap, c: &CycleSet) -> bool {
    clause.iter().any(|l| {
        let (cell, k) = varmap.matrix_info(l.var()).expect("matrix literal");
        (c.at(cell) == k) == l.is_positive()
    })
}

/// Value of `l` under the assignment that induces `p`: false if its value
/// left the domain, true if the domain is that single value, else open.
pub fn lit_under(l: Lit, varmap: &VarMap, p: &PartialCycleSet) -> Option<bool> {
    let (cell, k) = varmap.matrix_info(l.var()).expect("matrix literal");
    let d = p.get(cell);
    let v = if !d.contains(k) {
        Some(false)
    } else if d.is_singleton() {
        Some(true)
    } else {
        None
    };
    v.map(|b| b == l.is_positive())
}

/// Everything a random clause-soundness case needs for one diagonal.
pub struct DiagonalCase {
    pub t: Diagonal,
    pub varmap: VarMap,
    pub all: Vec<CycleSet>,
    pub lex_min: Vec<CycleSet>,
}

impl DiagonalCase {
    pub fn new(t: Diagonal) -> DiagonalCase {
        let varmap = encode_axioms(&t, EoMethod::Binary).varmap;
        let all = brute_force_diagonal(&t).unwrap();
        let lex_min = all
            .iter()
            .filter(|c| lowering_permutation(c, &t).is_none())
            .cloned()
            .collect();
        DiagonalCase {
            t,
            varmap,
            all,
            lex_min,
        }
    }
}

/// A random widening of `c`: each off-diagonal cell keeps its value and
/// gains random others (never the diagonal value of its row).
pub fn widen(c: &CycleSet, t: &Diagonal, rng: &mut ChaCha8Rng) -> PartialCycleSet {
    let n = c.n();
    let mut p = c.to_partial();
    let density = rng.gen_range(0.0..0.7);
    for cell in Cell::off_diagonal(n) {
        let mut d = Domain::single(c.at(cell));
        for k in 0..n {
            if k != t.successor(cell.row) && rng.gen_bool(density) {
                d.insert(k);
            }
        }
        p.set(cell, d).unwrap();
    }
    p
}

fn clause_checks(case: &DiagonalCase, p: &PartialCycleSet, clause: &[Lit], unit: bool) -> Result<(), String> {
    let values: Vec<Option<bool>> = clause.iter().map(|&l| lit_under(l, &case.varmap, p)).collect();
    if values.contains(&Some(true)) {
        return Err(format!("clause {clause:?} is satisfied by the triggering assignment"));
    }
    let open = values.iter().filter(|v| v.is_none()).count();
    if open != usize::from(unit) {
        return Err(format!("clause {clause:?} has {open} open literals, unit = {unit}"));
    }
    if let Some(c) = case.lex_min.iter().find(|c| !eval_clause(clause, &case.varmap, c)) {
        return Err(format!("clause {clause:?} excludes lex-min {}", c.to_line()));
    }
    let optimized = optimize_clause(clause, &case.varmap);
    if optimized.len() > clause.len() {
        return Err(format!("optimization grew {clause:?} to {optimized:?}"));
    }
    if let Some(c) = case
        .all
        .iter()
        .find(|c| eval_clause(clause, &case.varmap, c) != eval_clause(&optimized, &case.varmap, c))
    {
        return Err(format!(
            "optimized {optimized:?} differs from {clause:?} on {}",
            c.to_line()
        ));
    }
    Ok(())
}

/// Random (P, witness) pairs at sizes 2 to 4 from both checkers; every
/// learned clause must spare all lex-min cycle sets, be falsified (or unit,
/// for propagations) under P, and keep its models when optimized.
pub fn clause_soundness(target: usize, rng: &mut ChaCha8Rng) -> Check {
    let cases: Vec<DiagonalCase> = (2..=4)
        .flat_map(|n| Diagonal::representatives(n).unwrap())
        .map(DiagonalCase::new)
        .filter(|c| c.all.len() > 1)
        .collect();
    let mut checkers: Vec<(BacktrackChecker, OracleInstance)> = cases
        .iter()
        .map(|c| {
            (
                BacktrackChecker::new(&c.t),
                OracleInstance::build(OracleKind::Partial, &c.t),
            )
        })
        .collect();
    let (mut breaking, mut propagating, mut attempts) = (0usize, 0usize, 0usize);
    while breaking + propagating < target {
        attempts += 1;
        if attempts > 200 * target {
            return Err(format!(
                "only {} pairs after {attempts} attempts",
                breaking + propagating
            ));
        }
        let idx = rng.gen_range(0..cases.len());
        let case = &cases[idx];
        let c = case.all.choose(rng).unwrap();
        let p = widen(c, &case.t, rng);
        let (backtrack, incremental) = &mut checkers[idx];
        let outcomes = [
            backtrack.check(&p, None, false).unwrap(),
            incremental.check(&p, None).unwrap(),
        ];
        for outcome in outcomes {
            match outcome {
                MinCheckOutcome::Witness { pi, cell } => {
                    let ext = extensions(&p).unwrap();
                    if let Some(bad) = ext.iter().find(|x| apply_to_cycle_set(&pi, x) >= **x) {
                        return Err(format!("{pi} is no witness for extension {}", bad.to_line()));
                    }
                    let clause = breaking_clause(&p, &pi, cell, &case.varmap).map_err(|e| e.to_string())?;
                    clause_checks(case, &p, &clause, false)?;
                    breaking += 1;
                }
                MinCheckOutcome::Propagate { pi, cell, eliminate } => {
                    match propagation_clause(&p, &pi, cell, eliminate, &case.varmap) {
                        Ok(clause) => {
                            clause_checks(case, &p, &clause, true)?;
                            propagating += 1;
                        }
                        Err(e) => return Err(format!("propagation {eliminate:?} rejected: {e}")),
                    }
                }
                MinCheckOutcome::Minimal | MinCheckOutcome::Unknown => {}
            }
        }
    }
    Ok(format!("{breaking} breaking and {propagating} propagation clauses"))
}
