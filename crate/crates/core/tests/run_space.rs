use std::collections::BTreeMap;

use num::{BigUint, One, Zero};
use proptest::prelude::*;

use quickspace::prob_core::{ratio, ExactRational};
use quickspace::quicksort_space::{
    build_via_core, comparisons, enumerate, enumerate_all, run_count, run_probability,
    same_distribution, Run, DEFAULT_ENUM_CAP,
};
use quickspace::recurrence::TExactTable;
use quickspace::simulator::{
    deterministic_pmf_with, max_comparisons, monte_carlo_with, permutation_expectation_with,
    randomized_quicksort, trial_counts, trial_rng, unrank_permutation, TrialReport,
};
use quickspace::splitter::{compare_prob_exact_in, verify_splitter_lemma, RankInterval};
use quickspace::{Error, Execution};

// C(2n, n) / (n + 1)
fn catalan(n: usize) -> BigUint {
    let mut c = BigUint::one();
    for k in 0..n {
        c = c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2);
    }
    c
}

#[test]
fn run_counts_are_catalan() {
    for n in 0..=20 {
        assert_eq!(run_count(n), catalan(n), "n = {n}");
    }
    for q in enumerate_all(9, DEFAULT_ENUM_CAP).unwrap() {
        assert_eq!(BigUint::from(q.len()), catalan(q.n()));
    }
}

#[test]
fn every_run_is_consistent() {
    for q in enumerate_all(7, DEFAULT_ENUM_CAP).unwrap() {
        let n = q.n();
        let total: ExactRational = q.weights().iter().sum();
        assert_eq!(total, ExactRational::one());
        for (run, w, t) in q.iter() {
            assert!(run.is_valid_for(n));
            assert_eq!(&run_probability(run, n).unwrap(), w);
            assert_eq!(comparisons(run, n).unwrap(), t);
            assert_eq!(run.to_string().parse::<Run>().unwrap(), *run);
            // sorting n items needs between n - 1 and n(n - 1)/2 comparisons
            assert!(t >= n.saturating_sub(1) as u64 && t <= max_comparisons(n));
        }
    }
}

#[test]
fn composition_matches_enumeration() {
    for n in 0..=8 {
        assert!(
            same_distribution(&build_via_core(n).unwrap(), &enumerate(n).unwrap()),
            "n = {n}"
        );
    }
    assert!(!same_distribution(
        &build_via_core(3).unwrap(),
        &enumerate(4).unwrap()
    ));
}

#[test]
fn oversized_requests_fail() {
    assert!(matches!(
        enumerate(DEFAULT_ENUM_CAP + 1),
        Err(Error::TooLarge { .. })
    ));
    assert!(matches!(
        build_via_core(DEFAULT_ENUM_CAP + 1),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn splitter_lemma_is_placement_independent() {
    let sweep = verify_splitter_lemma(8, Execution::default()).unwrap();
    assert!(sweep.passed(), "{:?}", sweep.exceptions);
    assert_eq!(
        sweep,
        verify_splitter_lemma(8, Execution::Sequential).unwrap()
    );
    assert_eq!(RankInterval::all(8).count(), 36);
}

#[test]
fn pair_probabilities_sum_to_expectation() {
    let table = TExactTable::build(9).unwrap();
    for q in enumerate_all(9, DEFAULT_ENUM_CAP).unwrap() {
        let n = q.n();
        let mut total = ExactRational::zero();
        for i in 1..=n {
            for j in i + 1..=n {
                let p = compare_prob_exact_in(&q, i, j).unwrap();
                assert_eq!(p, ratio(2, (j - i + 1) as i64));
                total += p;
            }
        }
        assert_eq!(&total, table.get(n).unwrap());
    }
}

#[test]
fn permutations_match_random_runs() {
    let table = TExactTable::build(8).unwrap();
    for n in 0..=8 {
        let seq = permutation_expectation_with(n, 8, Execution::Sequential).unwrap();
        assert_eq!(&seq, table.get(n).unwrap());
        assert_eq!(
            seq,
            permutation_expectation_with(n, 8, Execution::default()).unwrap()
        );
    }
    for n in 0..=7 {
        let pmf = deterministic_pmf_with(n, 8, Execution::default()).unwrap();
        assert_eq!(pmf, enumerate(n).unwrap().comparison_pmf());
        let mass: ExactRational = pmf.values().sum();
        assert_eq!(mass, ExactRational::one());
    }
    assert!(matches!(
        permutation_expectation_with(9, 8, Execution::Sequential),
        Err(Error::TooLarge { .. })
    ));
}

#[test]
fn monte_carlo_is_execution_independent() {
    let seq = monte_carlo_with(30, 2_000, 7, Execution::Sequential).unwrap();
    let par = monte_carlo_with(30, 2_000, 7, Execution::default()).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.mean.to_bits(), par.mean.to_bits());
    assert!(matches!(
        monte_carlo_with(5, 0, 1, Execution::Sequential),
        Err(Error::ZeroTrials)
    ));
}

#[test]
fn constant_counts_have_zero_variance() {
    let report = TrialReport::from_counts(2, 0, &[1, 1, 1]).unwrap();
    assert_eq!(
        (report.mean, report.variance, report.min, report.max),
        (1.0, 0.0, 1, 1)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sharding_does_not_change_trials(n in 0usize..40, split in 0u64..200, extra in 0u64..200, seed in any::<u64>()) {
        let whole = trial_counts(n, 0..split + extra, seed, Execution::Sequential);
        let mut parts = trial_counts(n, 0..split, seed, Execution::default());
        parts.extend(trial_counts(n, split..split + extra, seed, Execution::default()));
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn randomized_quicksort_sorts(items in prop::collection::btree_set(any::<i32>(), 0..60), seed in any::<u64>(), trial in any::<u64>()) {
        let mut shuffled: Vec<i32> = items.iter().copied().collect();
        shuffled.reverse();
        let (sorted, count) = randomized_quicksort(&shuffled, &mut trial_rng(seed, trial)).unwrap();
        prop_assert_eq!(sorted, items.iter().copied().collect::<Vec<_>>());
        let n = items.len();
        prop_assert!(count >= n.saturating_sub(1) as u64 && count <= max_comparisons(n));
    }

    #[test]
    fn unranking_yields_permutations(n in 0usize..9, index in any::<u64>()) {
        let total: u64 = (1..=n as u64).product();
        let mut p = unrank_permutation(n, index % total.max(1));
        p.sort();
        prop_assert_eq!(p, (0..n as u32).collect::<Vec<_>>());
    }
}

#[test]
fn enumeration_pmf_support() {
    let pmf: BTreeMap<u64, ExactRational> = enumerate(4).unwrap().comparison_pmf();
    // a middle root leaves sizes 1 and 2; an end root leaves a size-3 subproblem
    let expected: BTreeMap<u64, ExactRational> =
        [(4, ratio(1, 2)), (5, ratio(1, 6)), (6, ratio(1, 3))]
            .into_iter()
            .collect();
    assert_eq!(pmf, expected);
}
