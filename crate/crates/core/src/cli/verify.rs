//! The `verify` suites. Each suite returns one [`Check`] per property, with
//! the parameters it ran under.

use std::str::FromStr;

use num::{BigUint, One, ToPrimitive};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::prob_core::{
    self, normalization_audit, product, ratio, sample, ExactRational, FiniteSpace,
};
use crate::quicksort_space::{build_via_core_with_cap, enumerate_all, same_distribution, RunSpace};
use crate::recurrence::{self, bound_check, indicator_sum_with_cap, t_float_table, TExactTable};
use crate::simulator::{
    self, deterministic_pmf_with, max_comparisons, permutation_expectation_with, TrialReport,
};
use crate::splitter::{compare_prob_exact_in, verify_splitter_lemma_with_cap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    CoreLaws,
    Space,
    Recurrence,
    Splitter,
    Simulator,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "core-laws",
        "space",
        "recurrence",
        "splitter",
        "simulator",
        "all",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CoreLaws => "core-laws",
            Suite::Space => "space",
            Suite::Recurrence => "recurrence",
            Suite::Splitter => "splitter",
            Suite::Simulator => "simulator",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "core-laws" => Suite::CoreLaws,
            "space" => Suite::Space,
            "recurrence" => Suite::Recurrence,
            "splitter" => Suite::Splitter,
            "simulator" => Suite::Simulator,
            "all" => Suite::All,
            other => return Err(Error::UnknownSuite(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub lemma: String,
    pub parameters: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    /// Overrides each suite's sweep size when set.
    pub n_max: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    pub cap_enum: usize,
    pub cap_exact: usize,
    pub cap_perm: usize,
    /// Random instances per composition law.
    pub instances: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            n_max: None,
            trials: 100_000,
            seed: simulator::DEFAULT_SEED,
            cap_enum: crate::quicksort_space::DEFAULT_ENUM_CAP,
            cap_exact: recurrence::DEFAULT_EXACT_CAP,
            cap_perm: simulator::DEFAULT_PERM_CAP,
            instances: 500,
        }
    }
}

impl Settings {
    /// Rejects an explicit `n_max` above a cap the suite enumerates under.
    pub fn check(&self, suite: Suite) -> Result<()> {
        let Some(n) = self.n_max else { return Ok(()) };
        let caps = [
            (Suite::Space, "run enumeration", self.cap_enum),
            (Suite::Splitter, "run enumeration", self.cap_enum),
            (Suite::Recurrence, "exact recurrence", self.cap_exact),
            (Suite::Simulator, "permutation enumeration", self.cap_perm),
        ];
        for (s, what, cap) in caps {
            if (suite == s || suite == Suite::All) && n > cap {
                return Err(Error::TooLarge { what, n, cap });
            }
        }
        Ok(())
    }
}

pub const SPLITTER_N_MAX: usize = 8;
pub const INDICATOR_N_MAX: usize = 500;
pub const MONTE_CARLO_SIZES: [usize; 3] = [10, 50, 100];
pub const FLOAT_REL_TOL: f64 = 1e-9;
pub const Z_LIMIT: f64 = 3.0;

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: Suite) -> Self {
        Recorder {
            suite: suite.name(),
            checks: Vec::new(),
        }
    }

    fn push(&mut self, lemma: &str, parameters: String, passed: bool, detail: String) {
        self.checks.push(Check {
            suite: self.suite,
            lemma: lemma.to_string(),
            parameters,
            passed,
            detail,
        });
    }

    /// Records a check whose evaluation failed with an error as failed.
    fn push_result(&mut self, lemma: &str, parameters: String, outcome: Result<(bool, String)>) {
        match outcome {
            Ok((passed, detail)) => self.push(lemma, parameters, passed, detail),
            Err(e) => self.push(lemma, parameters, false, format!("error: {e}")),
        }
    }
}

pub fn run_suite(suite: Suite, settings: &Settings) -> Vec<Check> {
    match suite {
        Suite::CoreLaws => core_laws(settings),
        Suite::Space => space(settings),
        Suite::Recurrence => recurrence_suite(settings),
        Suite::Splitter => splitter(settings),
        Suite::Simulator => simulator_suite(settings),
        Suite::All => [
            Suite::CoreLaws,
            Suite::Space,
            Suite::Recurrence,
            Suite::Splitter,
            Suite::Simulator,
        ]
        .into_iter()
        .flat_map(|s| run_suite(s, settings))
        .collect(),
    }
}

fn core_laws(settings: &Settings) -> Vec<Check> {
    let mut r = Recorder::new(Suite::CoreLaws);

    let value = prob_core::coin_or_die().expected_points();
    r.push_result(
        "deferred decision, coin then coin-or-die",
        "X_c: heads=0 tails=1, X_d: face".into(),
        value.map(|v| (v == ratio(10, 4), format!("E = {v}"))),
    );

    let coin = FiniteSpace::uniform(vec!['h', 't']).expect("coin");
    let die = FiniteSpace::uniform((1..=6).collect::<Vec<u8>>()).expect("die");
    let joint = product(&coin, &die);
    r.push(
        "product space weights",
        "coin x die".into(),
        joint.len() == 12 && joint.weights().iter().all(|w| *w == ratio(1, 12)),
        format!("{} outcomes", joint.len()),
    );

    type Law = fn(&mut SplitMix64) -> Result<bool>;
    let laws: [(&str, Law); 5] = [
        ("product independence", sample::product_independence_holds),
        ("additivity over products", sample::sum_additivity_holds),
        (
            "conditional composition conditioning",
            sample::compose_conditioning_holds,
        ),
        (
            "principle of deferred decision",
            sample::deferred_decision_holds,
        ),
        ("law of total expectation", sample::total_expectation_holds),
    ];
    for (k, (name, law)) in laws.iter().enumerate() {
        let mut rng = SplitMix64::seed_from_u64(settings.seed.wrapping_add(k as u64));
        let outcome = (0..settings.instances).try_fold(0usize, |failures, _| {
            law(&mut rng).map(|ok| failures + usize::from(!ok))
        });
        r.push_result(
            name,
            format!("instances={} seed={}", settings.instances, settings.seed),
            outcome.map(|failures| (failures == 0, format!("{failures} failing instances"))),
        );
    }
    r.checks
}

/// Catalan numbers from the binomial formula `C(2n, n) / (n + 1)`.
fn catalan_binomial(n: usize) -> BigUint {
    let mut c = BigUint::one();
    for k in 0..n {
        c = c * BigUint::from(2 * n - k) / BigUint::from(k + 1);
    }
    c / BigUint::from(n + 1)
}

fn space(settings: &Settings) -> Vec<Check> {
    let mut r = Recorder::new(Suite::Space);
    let n_max = settings.n_max.unwrap_or(settings.cap_enum);
    let params = format!("n<={n_max}");
    let before = normalization_audit();
    let spaces = match enumerate_all(n_max, settings.cap_enum) {
        Ok(s) => s,
        Err(e) => {
            r.push("enumeration", params, false, format!("error: {e}"));
            return r.checks;
        }
    };

    let golden = examples_match(&spaces);
    r.push(
        "Q_2 and Q_3 examples",
        "n=2,3".into(),
        golden.is_ok(),
        golden
            .err()
            .unwrap_or_else(|| "runs, weights and counts match".into()),
    );

    let bad_sizes: Vec<usize> = spaces
        .iter()
        .filter(|q| BigUint::from(q.len()) != catalan_binomial(q.n()))
        .map(RunSpace::n)
        .collect();
    r.push(
        "|Q_n| is the Catalan number",
        params.clone(),
        bad_sizes.is_empty(),
        at_sizes("mismatches", &bad_sizes),
    );

    let after = normalization_audit();
    let unnormalized: Vec<usize> = spaces
        .iter()
        .filter(|q| !q.weights().iter().sum::<ExactRational>().is_one())
        .map(RunSpace::n)
        .collect();
    r.push(
        "q_n sums to 1",
        params.clone(),
        unnormalized.is_empty() && after.violations == before.violations,
        format!(
            "{}, {} audit violations",
            at_sizes("violations", &unnormalized),
            after.violations - before.violations
        ),
    );

    let table = TExactTable::build_with_cap(n_max, settings.cap_exact.max(n_max));
    r.push_result(
        "E(t_n) by enumeration equals the recurrence",
        params.clone(),
        table.map(|t| {
            let bad: Vec<usize> = spaces
                .iter()
                .filter(|q| &q.expected_comparisons() != t.get(q.n()).unwrap())
                .map(RunSpace::n)
                .collect();
            (bad.is_empty(), at_sizes("mismatches", &bad))
        }),
    );

    let compose_max = n_max.min(8);
    let compose = (0..=compose_max).try_fold(Vec::new(), |mut bad, n| {
        let composed = build_via_core_with_cap(n, settings.cap_enum)?;
        if !same_distribution(&composed, &spaces[n]) {
            bad.push(n);
        }
        Ok::<_, Error>(bad)
    });
    r.push_result(
        "composition primitives rebuild Q_n",
        format!("n<={compose_max}"),
        compose.map(|bad| (bad.is_empty(), at_sizes("mismatches", &bad))),
    );

    let out_of_range: Vec<usize> = spaces
        .iter()
        .filter(|q| {
            q.comparison_counts()
                .iter()
                .any(|&t| t > max_comparisons(q.n()))
        })
        .map(RunSpace::n)
        .collect();
    r.push(
        "t_n <= n(n-1)/2",
        params,
        out_of_range.is_empty(),
        at_sizes("violations", &out_of_range),
    );
    r.checks
}

fn examples_match(spaces: &[RunSpace]) -> std::result::Result<(), String> {
    let expect = |n: usize, runs: &[&str], weights: &[ExactRational], counts: &[u64]| {
        let q = spaces.get(n).ok_or(format!("Q_{n} not enumerated"))?;
        let got: Vec<String> = q.runs().iter().map(|r| r.to_string()).collect();
        if got != runs || q.weights() != weights || q.comparison_counts() != counts {
            return Err(format!("Q_{n} differs: {got:?}"));
        }
        Ok(())
    };
    let (half, third, sixth) = (ratio(1, 2), ratio(1, 3), ratio(1, 6));
    expect(2, &["(1,⊥,⊥)", "(2,⊥,⊥)"], &[half.clone(), half], &[1, 1])?;
    expect(
        3,
        &[
            "(1,⊥,(1,⊥,⊥))",
            "(1,⊥,(2,⊥,⊥))",
            "(2,⊥,⊥)",
            "(3,(1,⊥,⊥),⊥)",
            "(3,(2,⊥,⊥),⊥)",
        ],
        &[sixth.clone(), sixth.clone(), third, sixth.clone(), sixth],
        &[3, 3, 2, 3, 3],
    )
}

fn recurrence_suite(settings: &Settings) -> Vec<Check> {
    let mut r = Recorder::new(Suite::Recurrence);
    let cap = settings.cap_exact;
    let table = match TExactTable::build_with_cap(cap, cap) {
        Ok(t) => t,
        Err(e) => {
            r.push(
                "exact recurrence",
                format!("n<={cap}"),
                false,
                format!("error: {e}"),
            );
            return r.checks;
        }
    };
    let exact = table.values();

    let n_ind = settings.n_max.unwrap_or(INDICATOR_N_MAX).min(cap);
    let indicator = (0..=n_ind)
        .chain(std::iter::once(cap))
        .try_fold(Vec::new(), |mut bad, n| {
            if indicator_sum_with_cap(n, cap)? != exact[n] {
                bad.push(n);
            }
            Ok::<_, Error>(bad)
        });
    r.push_result(
        "indicator sum equals T(n)",
        format!("n<={n_ind} and n={cap}"),
        indicator.map(|bad| (bad.is_empty(), at_sizes("mismatches", &bad))),
    );

    let floats = t_float_table(cap);
    let worst = (0..=cap)
        .map(|n| {
            let e = exact[n].to_f64().expect("finite");
            ((floats[n] - e).abs() / e.max(1.0), n)
        })
        .fold((0.0f64, 0usize), |a, b| if b.0 > a.0 { b } else { a });
    r.push(
        "floating recurrence tracks the exact one",
        format!("n<={cap} rel_tol={FLOAT_REL_TOL:e}"),
        worst.0 <= FLOAT_REL_TOL,
        format!("worst relative error {:.3e} at n = {}", worst.0, worst.1),
    );

    let scan = recurrence::DEFAULT_BOUND_SCAN;
    let violation = bound_check(scan);
    r.push(
        "T(n) <= 2n ln n",
        format!("1<=n<={scan} guard={:e}", recurrence::BOUND_GUARD),
        violation.is_none(),
        match violation {
            None => format!(
                "T(100) = {:.2} vs bound {:.2}",
                floats[100.min(cap)],
                recurrence::upper_bound(100)
            ),
            Some(n) => format!("first violation at n = {n}"),
        },
    );

    let not_increasing: Vec<usize> = (2..cap).filter(|&n| exact[n + 1] <= exact[n]).collect();
    r.push(
        "T(n) strictly increasing from n = 2",
        format!("n<={cap}"),
        not_increasing.is_empty(),
        at_sizes("violations", &not_increasing),
    );
    r.checks
}

fn splitter(settings: &Settings) -> Vec<Check> {
    let mut r = Recorder::new(Suite::Splitter);
    let n_max = settings.n_max.unwrap_or(SPLITTER_N_MAX);
    let params = format!("n<={n_max}");
    match verify_splitter_lemma_with_cap(n_max, settings.cap_enum, Execution::default()) {
        Ok(sweep) => {
            r.push(
                "first splitter in [i,j] is q with probability 1/(j-i+1)",
                params.clone(),
                sweep.exceptions.is_empty(),
                format!(
                    "{} triples, {} exceptions{}",
                    sweep.triples_checked,
                    sweep.exceptions.len(),
                    sweep
                        .exceptions
                        .first()
                        .map(|e| format!(
                            "; first: n={} [{},{}] q={} p={}",
                            e.interval.n(),
                            e.interval.low(),
                            e.interval.high(),
                            e.q,
                            e.probability
                        ))
                        .unwrap_or_default()
                ),
            );
            r.push(
                "every interval is split",
                params.clone(),
                sweep.unsplit.is_empty(),
                format!(
                    "{} intervals without total probability 1",
                    sweep.unsplit.len()
                ),
            );
        }
        Err(e) => r.push(
            "splitter sweep",
            params.clone(),
            false,
            format!("error: {e}"),
        ),
    }

    let pairs = (|| {
        let spaces = enumerate_all(n_max, settings.cap_enum)?;
        let table = TExactTable::build_with_cap(n_max, settings.cap_exact.max(n_max))?;
        let mut bad = Vec::new();
        for q in &spaces {
            let n = q.n();
            let mut total = ExactRational::from_integer(0.into());
            for i in 1..=n {
                for j in i + 1..=n {
                    let p = compare_prob_exact_in(q, i, j)?;
                    if p != ratio(2, (j - i + 1) as i64) {
                        bad.push(n);
                    }
                    total += p;
                }
            }
            if &total != table.get(n).unwrap() {
                bad.push(n);
            }
        }
        bad.dedup();
        Ok::<_, Error>(bad)
    })();
    r.push_result(
        "pair comparison probabilities 2/(j-i+1) sum to T(n)",
        params,
        pairs.map(|bad| (bad.is_empty(), at_sizes("mismatches", &bad))),
    );
    r.checks
}

fn simulator_suite(settings: &Settings) -> Vec<Check> {
    let mut r = Recorder::new(Suite::Simulator);
    let n_perm = settings.n_max.unwrap_or(settings.cap_perm);
    let exec = Execution::default();

    let perms = (|| {
        let table = TExactTable::build_with_cap(n_perm, settings.cap_exact.max(n_perm))?;
        let mut bad = Vec::new();
        for n in 0..=n_perm {
            if &permutation_expectation_with(n, settings.cap_perm, exec)? != table.get(n).unwrap() {
                bad.push(n);
            }
        }
        Ok::<_, Error>(bad)
    })();
    r.push_result(
        "first-element QuickSort on uniform permutations has mean T(n)",
        format!("n<={n_perm}"),
        perms.map(|bad| (bad.is_empty(), at_sizes("mismatches", &bad))),
    );

    let n_pmf = n_perm.min(7);
    let pmfs = (|| {
        let spaces = enumerate_all(n_pmf, settings.cap_enum)?;
        let mut bad = Vec::new();
        for q in &spaces {
            if deterministic_pmf_with(q.n(), settings.cap_perm, exec)? != q.comparison_pmf() {
                bad.push(q.n());
            }
        }
        Ok::<_, Error>(bad)
    })();
    r.push_result(
        "first-element and random-splitter count distributions agree",
        format!("n<={n_pmf}"),
        pmfs.map(|bad| (bad.is_empty(), at_sizes("mismatches", &bad))),
    );

    let floats = t_float_table(*MONTE_CARLO_SIZES.iter().max().unwrap());
    for n in MONTE_CARLO_SIZES {
        let report = simulator::monte_carlo_with(n, settings.trials, settings.seed, exec);
        r.push_result(
            "Monte Carlo mean within 3 standard errors of T(n)",
            format!("n={n} trials={} seed={}", settings.trials, settings.seed),
            report.map(|rep| {
                let z = z_score(rep.mean, floats[n], rep.std_error());
                (
                    z.abs() <= Z_LIMIT,
                    format!(
                        "mean={:.4} T(n)={:.4} stderr={:.4} z={z:.3}",
                        rep.mean,
                        floats[n],
                        rep.std_error()
                    ),
                )
            }),
        );
    }

    let repro_trials = settings.trials.min(10_000);
    let a = simulator::monte_carlo_with(30, repro_trials, settings.seed, Execution::Sequential);
    let b = simulator::monte_carlo_with(30, repro_trials, settings.seed, exec);
    r.push_result(
        "reports reproduce bit for bit",
        format!("n=30 trials={repro_trials} seed={}", settings.seed),
        a.and_then(|a| b.map(|b| (same_bits(&a, &b), format!("mean={}", a.mean)))),
    );

    let whole = simulator::trial_counts(12, 0..3000, settings.seed, Execution::Sequential);
    let mut pieces = Vec::new();
    for range in [0..1000, 1000..1001, 1001..2500, 2500..3000] {
        pieces.extend(simulator::trial_counts(12, range, settings.seed, exec));
    }
    r.push(
        "sharded trials match a single run",
        format!("n=12 trials=3000 seed={}", settings.seed),
        whole == pieces,
        "4 uneven shards vs one".to_string(),
    );

    let support = (|| {
        let n = 10.min(settings.cap_enum);
        let spaces = enumerate_all(n, settings.cap_enum)?;
        let min = *spaces[n].comparison_counts().iter().min().unwrap();
        let counts = simulator::trial_counts(n, 0..20_000, settings.seed, exec);
        let ok = counts.iter().all(|&c| c >= min && c <= max_comparisons(n));
        Ok::<_, Error>((
            ok,
            format!("n={n}: counts in [{min}, {}]", max_comparisons(n)),
        ))
    })();
    r.push_result(
        "trial counts stay inside the support of t_n",
        format!("trials=20000 seed={}", settings.seed),
        support,
    );
    r.checks
}

fn at_sizes(what: &str, sizes: &[usize]) -> String {
    if sizes.is_empty() {
        format!("no {what}")
    } else {
        format!("{what} at n = {sizes:?}")
    }
}

fn same_bits(a: &TrialReport, b: &TrialReport) -> bool {
    a == b && a.mean.to_bits() == b.mean.to_bits() && a.variance.to_bits() == b.variance.to_bits()
}

/// `(mean - reference) / stderr`, with a zero spread treated as exact
/// agreement when the mean equals the reference.
pub fn z_score(mean: f64, reference: f64, std_error: f64) -> f64 {
    if std_error == 0.0 {
        if mean == reference {
            0.0
        } else {
            (mean - reference).signum() * f64::INFINITY
        }
    } else {
        (mean - reference) / std_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert_eq!(
            "bogus".parse::<Suite>(),
            Err(Error::UnknownSuite("bogus".into()))
        );
    }

    #[test]
    fn binomial_catalan() {
        let first: Vec<u64> = (0..10)
            .map(|n| catalan_binomial(n).to_u64().unwrap())
            .collect();
        assert_eq!(first, [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862]);
        assert_eq!(catalan_binomial(12), BigUint::from(208_012u32));
    }

    #[test]
    fn z_score_zero_spread() {
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert_eq!(z_score(2.0, 1.0, 0.0), f64::INFINITY);
        assert_eq!(z_score(3.0, 1.0, 0.5), 4.0);
    }

    #[test]
    fn small_suites_pass() {
        let settings = Settings {
            n_max: Some(5),
            trials: 2000,
            instances: 50,
            ..Settings::default()
        };
        for suite in [Suite::CoreLaws, Suite::Space, Suite::Splitter] {
            for check in run_suite(suite, &settings) {
                assert!(check.passed, "{check:?}");
            }
        }
    }
}
