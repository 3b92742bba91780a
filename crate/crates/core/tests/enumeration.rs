use cyclesat::driver::{run, Backend, RunConfig, RunError};
use cyclesat::encoding::EoMethod;
use cyclesat::oracle::{brute_force_all, lex_min_reps, verify_entries};
use cyclesat::symmetry::Diagonal;
use cyclesat::CycleSet;

const COUNTS: [(usize, usize); 4] = [(2, 2), (3, 5), (4, 23), (5, 88)];

fn lines(sets: &[CycleSet]) -> String {
    sets.iter().map(|c| c.to_line() + "\n").collect()
}

#[test]
fn class_counts_with_both_backends() {
    for backend in [Backend::Backtrack, Backend::Incremental] {
        for (n, want) in COUNTS {
            let out = run(&RunConfig::new(n, backend)).unwrap();
            assert_eq!(out.sorted_solutions().len(), want, "size {n}, {backend}");
            assert_eq!(out.stats().total_solutions(), want as u64);
        }
    }
}

#[test]
fn commander_encoding_and_no_partial_checks() {
    for backend in [Backend::Backtrack, Backend::Incremental] {
        let mut config = RunConfig::new(5, backend);
        config.eo = EoMethod::Commander;
        assert_eq!(run(&config).unwrap().sorted_solutions().len(), 88);
        config.freq = 0;
        assert_eq!(run(&config).unwrap().sorted_solutions().len(), 88);
        config.freq = 1;
        config.limit = 1;
        assert_eq!(run(&config).unwrap().sorted_solutions().len(), 88);
    }
}

#[test]
fn matches_brute_force_per_diagonal() {
    for n in 2..=4 {
        let reference = lex_min_reps(&brute_force_all(n).unwrap());
        for t in Diagonal::representatives(n).unwrap() {
            let mut config = RunConfig::new(n, Backend::Incremental);
            config.diagonal = Some(t.to_string());
            let got = run(&config).unwrap().sorted_solutions();
            let want: Vec<CycleSet> = reference
                .iter()
                .filter(|c| c.diagonal().as_ref() == Some(t.permutation()))
                .cloned()
                .collect();
            assert_eq!(lines(&got), lines(&want), "size {n}, diagonal {t}");
        }
    }
}

#[test]
fn backends_agree_up_to_five() {
    for n in 2..=5 {
        let a = run(&RunConfig::new(n, Backend::Backtrack)).unwrap().sorted_solutions();
        let b = run(&RunConfig::new(n, Backend::Incremental))
            .unwrap()
            .sorted_solutions();
        assert_eq!(a, b, "size {n}");
    }
}

#[test]
fn output_is_clean_under_verification() {
    let out = run(&RunConfig::new(5, Backend::Backtrack)).unwrap();
    let entries: Vec<(usize, CycleSet)> = out
        .sorted_solutions()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c))
        .collect();
    let report = verify_entries(&entries, 5, None);
    assert!(report.is_clean(), "{}", report.to_text());
    assert_eq!(report.entries, 88);
    assert_eq!(report.per_diagonal.values().sum::<usize>(), 88);
}

#[test]
fn stats_are_consistent() {
    let out = run(&RunConfig::new(5, Backend::Backtrack)).unwrap();
    let stats = out.stats();
    assert_eq!(stats.diagonals.len(), 7);
    for (name, d) in &stats.diagonals {
        assert_eq!(d.partial_outcomes.total(), d.partial_checks, "{name}");
        assert_eq!(d.complete_outcomes.total(), d.complete_checks, "{name}");
        assert_eq!(d.complete_outcomes.minimal, d.solutions, "{name}");
        assert!(d.times.sum() <= d.total_time + 1e-9, "{name}");
    }
    let back = cyclesat::Stats::from_json(&stats.to_json()).unwrap();
    assert_eq!(back, stats);
}

#[test]
fn runs_are_deterministic() {
    let mut config = RunConfig::new(5, Backend::Incremental);
    config.seed = 11;
    let a = run(&config).unwrap();
    let b = run(&config).unwrap();
    assert_eq!(lines(&a.raw_solutions()), lines(&b.raw_solutions()));
    config.workers = 3;
    let c = run(&config).unwrap();
    assert_eq!(lines(&a.sorted_solutions()), lines(&c.sorted_solutions()));
}

#[test]
fn invalid_configs_are_rejected() {
    let mut config = RunConfig::new(1, Backend::Backtrack);
    assert!(matches!(run(&config), Err(RunError::InvalidConfig(_))));
    config.n = 4;
    config.diagonal = Some("(1 5)".into());
    assert!(matches!(run(&config), Err(RunError::InvalidConfig(_))));
    config.diagonal = None;
    config.limit = 0;
    assert!(matches!(run(&config), Err(RunError::InvalidConfig(_))));
}

#[test]
fn non_canonical_diagonal_selects_its_class() {
    let mut config = RunConfig::new(4, Backend::Backtrack);
    config.diagonal = Some("(2 4)".into());
    let out = run(&config).unwrap();
    assert_eq!(out.runs.len(), 1);
    assert_eq!(out.runs[0].diagonal.to_string(), "(1 2)");
    assert_eq!(out.sorted_solutions().len(), 7);
}
