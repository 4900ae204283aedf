//! Instrumented QuickSort: the randomized variant (uniform splitter) and the
//! deterministic variant (first element as splitter), each counting
//! element-to-splitter comparisons. A partition of `m` elements compares each
//! of the other `m - 1` elements with the splitter exactly once.
//!
//! # Random streams
//!
//! The generator is SplitMix64 (64-bit state `x`; each step sets
//! `x += 0x9e3779b97f4a7c15` and outputs `mix(x)` where
//! `mix(z) = z ^ z>>30 * 0xbf58476d1ce4e5b9; z ^ z>>27 * 0x94d049bb133111eb; z ^ z>>31`).
//! Trial `t` of a Monte Carlo run with seed `s` uses a fresh generator whose
//! initial state is `mix(s + (t + 1) * 0x9e3779b97f4a7c15)`, i.e. output
//! number `t` of a SplitMix64 stream started at `s`.
//!
//! A splitter index in `0..m` is drawn by rejection: draw `x` until
//! `x < 2^64 - (2^64 mod m)`, then take `x mod m`. The chosen element is
//! removed by moving the last element into its slot, and the remaining
//! elements are split stably into smaller and larger parts. Recursion visits
//! the left part before the right part, so draws happen in pre-order.
//! Monte Carlo trials sort the identity sequence `1, 2, ..., n`.

use std::collections::BTreeMap;
use std::ops::Range;

use num::{BigInt, BigRational};
use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::prob_core::ExactRational;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PERM_CAP: usize = 8;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> SplitMix64 {
    let mut jump = SplitMix64::seed_from_u64(seed.wrapping_add(trial.wrapping_mul(GOLDEN_GAMMA)));
    SplitMix64::seed_from_u64(jump.next_u64())
}

/// Uniform index in `0..m` without modulo bias. `m` must be positive.
pub fn uniform_index<R: RngCore>(rng: &mut R, m: usize) -> usize {
    let m = m as u64;
    let rejected = m.wrapping_neg() % m; // 2^64 mod m
    loop {
        let x = rng.next_u64();
        if x <= u64::MAX - rejected {
            return (x % m) as usize;
        }
    }
}

fn ensure_distinct<T: Ord>(items: &[T]) -> Result<()> {
    let mut refs: Vec<&T> = items.iter().collect();
    refs.sort_unstable();
    if refs.windows(2).any(|w| w[0] == w[1]) {
        Err(Error::DuplicateItems)
    } else {
        Ok(())
    }
}

struct Counter(u64);

impl Counter {
    fn less<T: Ord>(&mut self, item: &T, splitter: &T) -> bool {
        self.0 += 1;
        item < splitter
    }
}

fn partition<T: Ord>(items: Vec<T>, splitter: &T, counter: &mut Counter) -> (Vec<T>, Vec<T>) {
    items.into_iter().partition(|x| counter.less(x, splitter))
}

fn randomized<T: Ord, R: RngCore>(
    mut items: Vec<T>,
    rng: &mut R,
    counter: &mut Counter,
    out: &mut Vec<T>,
) {
    if items.len() <= 1 {
        out.append(&mut items);
        return;
    }
    let splitter = items.swap_remove(uniform_index(rng, items.len()));
    let (smaller, larger) = partition(items, &splitter, counter);
    randomized(smaller, rng, counter, out);
    out.push(splitter);
    randomized(larger, rng, counter, out);
}

fn deterministic<T: Ord>(mut items: Vec<T>, counter: &mut Counter, out: &mut Vec<T>) {
    if items.len() <= 1 {
        out.append(&mut items);
        return;
    }
    let rest = items.split_off(1);
    let splitter = items.pop().expect("non-empty");
    let (smaller, larger) = partition(rest, &splitter, counter);
    deterministic(smaller, counter, out);
    out.push(splitter);
    deterministic(larger, counter, out);
}

/// Sorts a copy of `items` with uniformly random splitters drawn from `rng`.
/// Returns the sorted items and the number of comparisons.
pub fn randomized_quicksort<T: Ord + Clone, R: RngCore>(
    items: &[T],
    rng: &mut R,
) -> Result<(Vec<T>, u64)> {
    ensure_distinct(items)?;
    let mut counter = Counter(0);
    let mut out = Vec::with_capacity(items.len());
    randomized(items.to_vec(), rng, &mut counter, &mut out);
    Ok((out, counter.0))
}

pub fn randomized_quicksort_count<T: Ord + Clone>(items: &[T], seed: u64) -> Result<u64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    Ok(randomized_quicksort(items, &mut rng)?.1)
}

/// Sorts a copy of `items` using the first element of every subsequence as
/// its splitter.
pub fn deterministic_quicksort<T: Ord + Clone>(items: &[T]) -> Result<(Vec<T>, u64)> {
    ensure_distinct(items)?;
    let mut counter = Counter(0);
    let mut out = Vec::with_capacity(items.len());
    deterministic(items.to_vec(), &mut counter, &mut out);
    Ok((out, counter.0))
}

pub fn deterministic_quicksort_count<T: Ord + Clone>(items: &[T]) -> Result<u64> {
    Ok(deterministic_quicksort(items)?.1)
}

/// Monte Carlo summary of randomized QuickSort on `1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub n: usize,
    pub trials: u64,
    pub mean: f64,
    /// Unbiased sample variance; 0 for a single trial.
    pub variance: f64,
    pub seed: u64,
    pub min: u64,
    pub max: u64,
}

impl TrialReport {
    /// Summarizes counts. The moments are formed from exact integer sums, so
    /// the report depends only on the multiset of counts.
    pub fn from_counts(n: usize, seed: u64, counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::ZeroTrials);
        }
        let trials = counts.len() as u128;
        let sum: u128 = counts.iter().map(|&c| c as u128).sum();
        let sum_sq: u128 = counts.iter().map(|&c| (c as u128) * (c as u128)).sum();
        let variance = if trials > 1 {
            let spread = trials * sum_sq - sum * sum;
            ratio_to_f64(spread, trials * (trials - 1))
        } else {
            0.0
        };
        Ok(TrialReport {
            n,
            trials: trials as u64,
            mean: ratio_to_f64(sum, trials),
            variance,
            seed,
            min: *counts.iter().min().expect("non-empty"),
            max: *counts.iter().max().expect("non-empty"),
        })
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }
}

fn ratio_to_f64(num: u128, den: u128) -> f64 {
    use num::ToPrimitive;
    BigRational::new(BigInt::from(num), BigInt::from(den))
        .to_f64()
        .expect("finite")
}

/// Comparison counts of trials `trials.start..trials.end`, in trial order.
pub fn trial_counts(n: usize, trials: Range<u64>, seed: u64, exec: Execution) -> Vec<u64> {
    let input: Vec<u32> = (1..=n as u32).collect();
    exec::map_range(exec, trials, |t| {
        let mut rng = trial_rng(seed, t);
        let mut counter = Counter(0);
        let mut out = Vec::with_capacity(n);
        randomized(input.clone(), &mut rng, &mut counter, &mut out);
        counter.0
    })
}

pub fn monte_carlo(n: usize, trials: u64, seed: u64) -> Result<TrialReport> {
    monte_carlo_with(n, trials, seed, Execution::default())
}

pub fn monte_carlo_with(n: usize, trials: u64, seed: u64, exec: Execution) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    TrialReport::from_counts(n, seed, &trial_counts(n, 0..trials, seed, exec))
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The permutation of `0..n` with lexicographic index `index`.
pub fn unrank_permutation(n: usize, mut index: u64) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut out = Vec::with_capacity(n);
    for remaining in (1..=n).rev() {
        let block = factorial(remaining - 1);
        let k = (index / block) as usize;
        index %= block;
        out.push(pool.remove(k));
    }
    out
}

fn check_perm_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::TooLarge {
            what: "permutation enumeration",
            n,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Deterministic comparison count for every permutation of `0..n`, in
/// lexicographic order.
pub fn permutation_counts(n: usize, cap: usize, exec: Execution) -> Result<Vec<u64>> {
    check_perm_cap(n, cap)?;
    Ok(exec::map_range(exec, 0..factorial(n), |r| {
        let mut counter = Counter(0);
        let mut out = Vec::with_capacity(n);
        deterministic(unrank_permutation(n, r), &mut counter, &mut out);
        counter.0
    }))
}

pub fn permutation_expectation_exact(n: usize) -> Result<ExactRational> {
    permutation_expectation_with(n, DEFAULT_PERM_CAP, Execution::default())
}

pub fn permutation_expectation_with(
    n: usize,
    cap: usize,
    exec: Execution,
) -> Result<ExactRational> {
    let counts = permutation_counts(n, cap, exec)?;
    let total: u64 = counts.iter().sum();
    Ok(BigRational::new(
        BigInt::from(total),
        BigInt::from(counts.len()),
    ))
}

pub fn deterministic_pmf(n: usize) -> Result<BTreeMap<u64, ExactRational>> {
    deterministic_pmf_with(n, DEFAULT_PERM_CAP, Execution::default())
}

pub fn deterministic_pmf_with(
    n: usize,
    cap: usize,
    exec: Execution,
) -> Result<BTreeMap<u64, ExactRational>> {
    let counts = permutation_counts(n, cap, exec)?;
    let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
    for c in &counts {
        *tally.entry(*c).or_default() += 1;
    }
    let total = BigInt::from(counts.len());
    Ok(tally
        .into_iter()
        .map(|(c, k)| (c, BigRational::new(BigInt::from(k), total.clone())))
        .collect())
}

/// Largest possible count for `n` elements: `n(n-1)/2`.
pub fn max_comparisons(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob_core::{integer, ratio};

    #[test]
    fn randomized_examples() {
        assert_eq!(randomized_quicksort_count::<u32>(&[], 1).unwrap(), 0);
        for seed in 0..20 {
            assert_eq!(randomized_quicksort_count(&[5, 3], seed).unwrap(), 1);
            let c = randomized_quicksort_count(&[3, 1, 2], seed).unwrap();
            assert!(c == 2 || c == 3);
        }
        assert_eq!(
            randomized_quicksort_count(&[1, 1], 0),
            Err(Error::DuplicateItems)
        );
    }

    #[test]
    fn randomized_sorts() {
        let items = [9, -3, 14, 0, 7, 2, 100, -50];
        let mut rng = trial_rng(3, 0);
        let (sorted, count) = randomized_quicksort(&items, &mut rng).unwrap();
        let mut expected = items.to_vec();
        expected.sort();
        assert_eq!(sorted, expected);
        assert!(count >= 13 && count <= max_comparisons(items.len()));
    }

    #[test]
    fn deterministic_examples() {
        assert_eq!(deterministic_quicksort_count(&[1, 2, 3]).unwrap(), 3);
        assert_eq!(deterministic_quicksort_count(&[2, 1, 3]).unwrap(), 2);
        assert_eq!(deterministic_quicksort_count(&["x"]).unwrap(), 0);
        assert_eq!(
            deterministic_quicksort_count(&[2, 2]),
            Err(Error::DuplicateItems)
        );
        let (sorted, _) = deterministic_quicksort(&[4, 1, 3, 2]).unwrap();
        assert_eq!(sorted, [1, 2, 3, 4]);
    }

    #[test]
    fn uniform_index_is_in_range_and_covers() {
        let mut rng = trial_rng(0, 0);
        let mut seen = [0u32; 7];
        for _ in 0..7000 {
            seen[uniform_index(&mut rng, 7)] += 1;
        }
        assert!(seen.iter().all(|&k| k > 800 && k < 1200), "{seen:?}");
        assert_eq!(uniform_index(&mut rng, 1), 0);
    }

    /// A generator that returns a fixed script of outputs.
    struct Script(Vec<u64>);

    impl RngCore for Script {
        fn next_u32(&mut self) -> u32 {
            self.next_u64() as u32
        }
        fn next_u64(&mut self) -> u64 {
            self.0.remove(0)
        }
        fn fill_bytes(&mut self, _: &mut [u8]) {
            unimplemented!()
        }
    }

    #[test]
    fn rejection_skips_the_biased_tail() {
        // 2^64 mod 3 = 1, so u64::MAX is rejected
        let mut rng = Script(vec![u64::MAX, 5]);
        assert_eq!(uniform_index(&mut rng, 3), 2);
        // powers of two reject nothing
        let mut rng = Script(vec![u64::MAX]);
        assert_eq!(uniform_index(&mut rng, 4), 3);
    }

    #[test]
    fn trial_streams_follow_the_documented_derivation() {
        let mut stream = SplitMix64::seed_from_u64(1234);
        for t in 0..5 {
            let state = stream.next_u64();
            let mut expected = SplitMix64::seed_from_u64(state);
            let mut actual = trial_rng(1234, t);
            assert_eq!(actual.next_u64(), expected.next_u64());
        }
        // reference output of SplitMix64 seeded with 0
        assert_eq!(SplitMix64::seed_from_u64(0).next_u64(), 0xe220a8397b1dcdaf);
    }

    #[test]
    fn constant_cost_for_two_elements() {
        let report = monte_carlo(2, 50, 9).unwrap();
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.variance, 0.0);
        assert_eq!((report.min, report.max), (1, 1));
    }

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(monte_carlo(5, 0, 1), Err(Error::ZeroTrials));
    }

    #[test]
    fn reports_are_reproducible_and_execution_independent() {
        let a = monte_carlo_with(20, 2000, 77, Execution::Sequential).unwrap();
        let b = monte_carlo_with(20, 2000, 77, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_ne!(
            a,
            monte_carlo_with(20, 2000, 78, Execution::Sequential).unwrap()
        );
    }

    #[test]
    fn report_moments() {
        let r = TrialReport::from_counts(3, 0, &[2, 3, 3, 3]).unwrap();
        assert_eq!(r.mean, 2.75);
        assert_eq!(r.variance, 0.25);
        assert_eq!(TrialReport::from_counts(3, 0, &[3]).unwrap().variance, 0.0);
        assert_eq!(TrialReport::from_counts(3, 0, &[]), Err(Error::ZeroTrials));
    }

    #[test]
    fn unranking_is_lexicographic() {
        assert_eq!(unrank_permutation(3, 0), [0, 1, 2]);
        assert_eq!(unrank_permutation(3, 1), [0, 2, 1]);
        assert_eq!(unrank_permutation(3, 5), [2, 1, 0]);
        assert!(unrank_permutation(0, 0).is_empty());
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(permutation_expectation_exact(2).unwrap(), integer(1));
        assert_eq!(permutation_expectation_exact(3).unwrap(), ratio(8, 3));
        assert_eq!(permutation_expectation_exact(0).unwrap(), integer(0));
        assert_eq!(
            deterministic_pmf(2).unwrap(),
            BTreeMap::from([(1, integer(1))])
        );
        assert_eq!(
            deterministic_pmf(3).unwrap(),
            BTreeMap::from([(2, ratio(1, 3)), (3, ratio(2, 3))])
        );
        assert!(matches!(
            permutation_expectation_exact(9),
            Err(Error::TooLarge { .. })
        ));
    }
}
