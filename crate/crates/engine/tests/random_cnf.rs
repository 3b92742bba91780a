use cyclesat_engine::{
    Assignment, EnumerationEnd, ExternalPropagator, LBool, Lit, NoPropagator, SolveResult, Solver, SolverConfig, Var,
};
use proptest::prelude::*;

fn satisfies(clauses: &[Vec<i32>], bits: u32) -> bool {
    clauses.iter().all(|c| {
        c.iter().any(|&l| {
            let v = l.unsigned_abs() - 1;
            let val = bits >> v & 1 == 1;
            val == (l > 0)
        })
    })
}

fn count_models(clauses: &[Vec<i32>], num_vars: u32) -> usize {
    (0..1u32 << num_vars).filter(|&b| satisfies(clauses, b)).count()
}

fn cnf(num_vars: u32, max_clauses: usize) -> impl Strategy<Value = Vec<Vec<i32>>> {
    let lit = (1..=num_vars as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
    prop::collection::vec(prop::collection::vec(lit, 1..4), 0..max_clauses)
}

fn load(clauses: &[Vec<i32>], num_vars: u32, config: SolverConfig) -> Solver {
    let mut s = Solver::new(config);
    s.ensure_vars(num_vars as usize);
    for c in clauses {
        let lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
        s.add_clause(&lits);
    }
    s
}

fn block(m: Assignment<'_>) -> Vec<Lit> {
    (0..m.num_vars() as u32)
        .map(|v| Lit::new(Var(v), !m.var_value(Var(v)).is_true()))
        .collect()
}

/// Rejects every model whose variables hold an odd number of true values.
struct EvenParity;

impl ExternalPropagator for EvenParity {
    fn check_model(&mut self, m: Assignment<'_>) -> Option<Vec<Lit>> {
        let ones = m.values().iter().filter(|v| v.is_true()).count();
        (ones % 2 == 1).then(|| block(m))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn verdict_and_model_agree_with_brute_force(clauses in cnf(8, 40), seed in any::<u64>()) {
        let mut s = load(&clauses, 8, SolverConfig { seed, ..SolverConfig::default() });
        let expected = count_models(&clauses, 8) > 0;
        match s.solve(&[]) {
            SolveResult::Sat => {
                prop_assert!(expected);
                let bits = (0..8).fold(0u32, |acc, v| acc | ((s.model_value(Var(v).pos()) == LBool::True) as u32) << v);
                prop_assert!(satisfies(&clauses, bits));
            }
            SolveResult::Unsat { .. } => prop_assert!(!expected),
            SolveResult::Unknown => prop_assert!(false, "no budget was set"),
        }
    }

    #[test]
    fn enumeration_counts_all_models(clauses in cnf(7, 25)) {
        let mut s = load(&clauses, 7, SolverConfig::default());
        let mut found = 0;
        let end = s.enumerate(&mut NoPropagator, |m| { found += 1; Some(block(m)) }).unwrap();
        prop_assert_eq!(end, EnumerationEnd::Exhausted);
        prop_assert_eq!(found, count_models(&clauses, 7));
    }

    #[test]
    fn enumeration_respects_propagator(clauses in cnf(6, 20)) {
        let mut s = load(&clauses, 6, SolverConfig::default());
        let mut found = 0;
        s.enumerate(&mut EvenParity, |m| { found += 1; Some(block(m)) }).unwrap();
        let expected = (0..1u32 << 6).filter(|&b| satisfies(&clauses, b) && b.count_ones() % 2 == 0).count();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn assumption_cores_are_unsat(clauses in cnf(8, 30), assume in prop::collection::vec((1..=8i32, any::<bool>()), 0..6)) {
        let mut s = load(&clauses, 8, SolverConfig::default());
        let assumptions: Vec<Lit> = assume.iter().map(|&(v, p)| Lit::from_dimacs(if p { v } else { -v })).collect();
        let mut with_units = clauses.clone();
        with_units.extend(assumptions.iter().map(|l| vec![l.to_dimacs()]));
        let expected = count_models(&with_units, 8) > 0;
        match s.solve(&assumptions) {
            SolveResult::Sat => {
                prop_assert!(expected);
                for a in &assumptions {
                    prop_assert_eq!(s.model_value(*a), LBool::True);
                }
            }
            SolveResult::Unsat { core } => {
                prop_assert!(!expected);
                for l in &core {
                    prop_assert!(assumptions.contains(l));
                }
                let mut with_core = clauses.clone();
                with_core.extend(core.iter().map(|l| vec![l.to_dimacs()]));
                prop_assert_eq!(count_models(&with_core, 8), 0);
            }
            SolveResult::Unknown => prop_assert!(false),
        }
        // the solver stays usable after assumption solving
        let plain = count_models(&clauses, 8) > 0;
        prop_assert_eq!(s.solve(&[]).is_sat(), plain);
    }
}
