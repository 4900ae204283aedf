//! Finite probability spaces over exact rationals.
//!
//! A [`FiniteSpace`] is a list of distinct outcome labels with non-negative
//! rational weights summing to exactly one. Spaces are built three ways:
//! directly with [`make_space`], as the [`product`] of two independent
//! experiments, or with [`conditional_compose`], where the second experiment
//! is chosen by the outcome of the first. Every constructor checks
//! normalization, and composite constructors record the check in a
//! process-wide audit (see [`normalization_audit`]).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::atomic::{AtomicU64, Ordering};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

pub mod sample;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type ExactRational = BigRational;

/// Shorthand for `num / den` as an [`ExactRational`].
///
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(value: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(value))
}

/// Outcome labels: opaque, totally ordered, hashable values.
pub trait Label: Clone + Eq + Hash + Ord + Debug {}

impl<T: Clone + Eq + Hash + Ord + Debug> Label for T {}

static SPACES_CHECKED: AtomicU64 = AtomicU64::new(0);
static VIOLATIONS: AtomicU64 = AtomicU64::new(0);

/// Running totals of normalization checks made in this process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationAudit {
    pub spaces_checked: u64,
    pub violations: u64,
}

pub fn normalization_audit() -> NormalizationAudit {
    NormalizationAudit {
        spaces_checked: SPACES_CHECKED.load(Ordering::Relaxed),
        violations: VIOLATIONS.load(Ordering::Relaxed),
    }
}

/// Records one normalization check. Returns whether `total` is exactly one.
pub(crate) fn audit_total(total: &ExactRational) -> bool {
    SPACES_CHECKED.fetch_add(1, Ordering::Relaxed);
    let ok = total.is_one();
    if !ok {
        VIOLATIONS.fetch_add(1, Ordering::Relaxed);
    }
    ok
}

/// A finite probability space `(S, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace<L: Label> {
    outcomes: Vec<L>,
    weights: Vec<ExactRational>,
    index: HashMap<L, usize>,
}

/// Builds a space from parallel lists of labels and weights.
pub fn make_space<L: Label>(
    outcomes: Vec<L>,
    weights: Vec<ExactRational>,
) -> Result<FiniteSpace<L>> {
    if outcomes.len() != weights.len() {
        return Err(Error::LengthMismatch {
            outcomes: outcomes.len(),
            weights: weights.len(),
        });
    }
    if outcomes.is_empty() {
        return Err(Error::Empty);
    }
    if let Some((index, weight)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
        return Err(Error::NegativeWeight {
            index,
            weight: weight.clone(),
        });
    }
    let index = index_labels(&outcomes)?;
    let sum: ExactRational = weights.iter().sum();
    if !sum.is_one() {
        return Err(Error::NotNormalized { sum });
    }
    SPACES_CHECKED.fetch_add(1, Ordering::Relaxed);
    Ok(FiniteSpace {
        outcomes,
        weights,
        index,
    })
}

fn index_labels<L: Label>(outcomes: &[L]) -> Result<HashMap<L, usize>> {
    let mut index = HashMap::with_capacity(outcomes.len());
    for (i, label) in outcomes.iter().enumerate() {
        if index.insert(label.clone(), i).is_some() {
            return Err(Error::DuplicateLabel { index: i });
        }
    }
    Ok(index)
}

impl<L: Label> FiniteSpace<L> {
    /// Assembles a space produced by one of the composition rules. Those rules
    /// guarantee normalization, so failing here is a bug and panics after
    /// being recorded in the audit.
    fn assemble(outcomes: Vec<L>, weights: Vec<ExactRational>) -> Self {
        let index = index_labels(&outcomes).expect("composed outcome labels must be distinct");
        let total: ExactRational = weights.iter().sum();
        assert!(audit_total(&total), "composed space sums to {total}, not 1");
        FiniteSpace {
            outcomes,
            weights,
            index,
        }
    }

    /// Uniform distribution over `outcomes`.
    pub fn uniform(outcomes: Vec<L>) -> Result<Self> {
        let n = outcomes.len() as i64;
        if n == 0 {
            return Err(Error::Empty);
        }
        let weights = vec![ratio(1, n); outcomes.len()];
        make_space(outcomes, weights)
    }

    /// Single outcome with probability one.
    pub fn point(label: L) -> Self {
        Self::assemble(vec![label], vec![ExactRational::one()])
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[L] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[ExactRational] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, &ExactRational)> {
        self.outcomes.iter().zip(&self.weights)
    }

    pub fn contains(&self, label: &L) -> bool {
        self.index.contains_key(label)
    }

    /// `p(s)` for a single outcome.
    pub fn weight_of(&self, label: &L) -> Option<&ExactRational> {
        self.index.get(label).map(|&i| &self.weights[i])
    }

    /// The event of all outcomes satisfying `pred`.
    pub fn event_where(&self, mut pred: impl FnMut(&L) -> bool) -> Event<L> {
        Event(self.outcomes.iter().filter(|l| pred(l)).cloned().collect())
    }

    /// The whole sample space as an event.
    pub fn full_event(&self) -> Event<L> {
        Event(self.outcomes.iter().cloned().collect())
    }

    /// Relabels every outcome. `f` must be injective on this space; a
    /// collision is reported as [`Error::DuplicateLabel`].
    pub fn map_labels<M: Label>(&self, f: impl FnMut(&L) -> M) -> Result<FiniteSpace<M>> {
        let outcomes: Vec<M> = self.outcomes.iter().map(f).collect();
        let index = index_labels(&outcomes)?;
        Ok(FiniteSpace {
            outcomes,
            weights: self.weights.clone(),
            index,
        })
    }
}

/// A subset of a space's outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event<L: Label>(BTreeSet<L>);

impl<L: Label> Event<L> {
    pub fn new(labels: impl IntoIterator<Item = L>) -> Self {
        Event(labels.into_iter().collect())
    }

    pub fn empty() -> Self {
        Event(BTreeSet::new())
    }

    pub fn contains(&self, label: &L) -> bool {
        self.0.contains(label)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &L> {
        self.0.iter()
    }

    pub fn intersection(&self, other: &Event<L>) -> Event<L> {
        Event(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn union(&self, other: &Event<L>) -> Event<L> {
        Event(self.0.union(&other.0).cloned().collect())
    }
}

impl<L: Label> FromIterator<L> for Event<L> {
    fn from_iter<I: IntoIterator<Item = L>>(iter: I) -> Self {
        Event::new(iter)
    }
}

/// A real-valued (here: rational-valued) function on outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVar<L: Label>(HashMap<L, ExactRational>);

impl<L: Label> RandomVar<L> {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (L, ExactRational)>) -> Self {
        RandomVar(pairs.into_iter().collect())
    }

    /// Tabulates `f` over every outcome of `space`.
    pub fn from_fn(space: &FiniteSpace<L>, mut f: impl FnMut(&L) -> ExactRational) -> Self {
        RandomVar(space.outcomes.iter().map(|l| (l.clone(), f(l))).collect())
    }

    pub fn constant(space: &FiniteSpace<L>, value: ExactRational) -> Self {
        Self::from_fn(space, |_| value.clone())
    }

    pub fn get(&self, label: &L) -> Option<&ExactRational> {
        self.0.get(label)
    }

    fn value(&self, label: &L) -> Result<&ExactRational> {
        self.0.get(label).ok_or_else(|| Error::UndefinedOutcome {
            label: format!("{label:?}"),
        })
    }
}

/// `p(A)`: the total weight of the outcomes in `event`.
pub fn prob<L: Label>(space: &FiniteSpace<L>, event: &Event<L>) -> Result<ExactRational> {
    let mut total = ExactRational::zero();
    for label in event.iter() {
        match space.weight_of(label) {
            Some(w) => total += w,
            None => {
                return Err(Error::UnknownLabel {
                    label: format!("{label:?}"),
                })
            }
        }
    }
    Ok(total)
}

/// `p(A | B) = p(A ∩ B) / p(B)`.
pub fn conditional_prob<L: Label>(
    space: &FiniteSpace<L>,
    event: &Event<L>,
    given: &Event<L>,
) -> Result<ExactRational> {
    let p_given = prob(space, given)?;
    if p_given.is_zero() {
        return Err(Error::ImpossibleCondition);
    }
    Ok(prob(space, &event.intersection(given))? / p_given)
}

/// The product space of two independent experiments, outcomes `(a, b)` with
/// weight `p1(a) * p2(b)`.
pub fn product<A: Label, B: Label>(
    first: &FiniteSpace<A>,
    second: &FiniteSpace<B>,
) -> FiniteSpace<(A, B)> {
    let capacity = first.len() * second.len();
    let mut outcomes = Vec::with_capacity(capacity);
    let mut weights = Vec::with_capacity(capacity);
    for (a, pa) in first.iter() {
        for (b, pb) in second.iter() {
            outcomes.push((a.clone(), b.clone()));
            weights.push(pa * pb);
        }
    }
    FiniteSpace::assemble(outcomes, weights)
}

/// Lifts an event of the first factor to `A × S2` in a product space.
pub fn embed_first<A: Label, B: Label>(event: &Event<A>, second: &FiniteSpace<B>) -> Event<(A, B)> {
    event
        .iter()
        .flat_map(|a| {
            second
                .outcomes()
                .iter()
                .map(move |b| (a.clone(), b.clone()))
        })
        .collect()
}

/// Lifts an event of the second factor to `S1 × B` in a product space.
pub fn embed_second<A: Label, B: Label>(first: &FiniteSpace<A>, event: &Event<B>) -> Event<(A, B)> {
    first
        .outcomes()
        .iter()
        .flat_map(|a| event.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

/// Two-stage experiment: run `base`, then run the space `branch(i)` chosen by
/// its outcome `i`. Outcomes are `(i, a)` with weight `p(i) * p_i(a)`.
pub fn conditional_compose<A: Label, B: Label>(
    base: &FiniteSpace<A>,
    branch: &HashMap<A, FiniteSpace<B>>,
) -> Result<FiniteSpace<(A, B)>> {
    conditional_compose_with(base, |i| branch.get(i).cloned())
}

/// Like [`conditional_compose`], with branches produced on demand.
pub fn conditional_compose_with<A: Label, B: Label>(
    base: &FiniteSpace<A>,
    mut branch: impl FnMut(&A) -> Option<FiniteSpace<B>>,
) -> Result<FiniteSpace<(A, B)>> {
    let mut outcomes = Vec::new();
    let mut weights = Vec::new();
    for (i, p) in base.iter() {
        let second = branch(i).ok_or_else(|| Error::MissingBranch {
            label: format!("{i:?}"),
        })?;
        for (a, pa) in second.iter() {
            outcomes.push((i.clone(), a.clone()));
            weights.push(p * pa);
        }
    }
    Ok(FiniteSpace::assemble(outcomes, weights))
}

/// `E(X) = Σ p(s) X(s)`.
pub fn expectation<L: Label>(space: &FiniteSpace<L>, rv: &RandomVar<L>) -> Result<ExactRational> {
    let mut total = ExactRational::zero();
    for (s, p) in space.iter() {
        total += p * rv.value(s)?;
    }
    Ok(total)
}

/// `E(X | A) = (1 / p(A)) Σ_{s ∈ A} p(s) X(s)`.
pub fn conditional_expectation<L: Label>(
    space: &FiniteSpace<L>,
    rv: &RandomVar<L>,
    given: &Event<L>,
) -> Result<ExactRational> {
    let p_given = prob(space, given)?;
    if p_given.is_zero() {
        return Err(Error::ImpossibleCondition);
    }
    let mut total = ExactRational::zero();
    for s in given.iter() {
        // membership was checked by `prob`
        total += space.weight_of(s).unwrap() * rv.value(s)?;
    }
    Ok(total / p_given)
}

/// Evaluates both sides of the law of total expectation for `partition` and
/// reports whether `Σ p(A_i) E(X | A_i) = E(X)`.
pub fn check_total_expectation<L: Label>(
    space: &FiniteSpace<L>,
    rv: &RandomVar<L>,
    partition: &[Event<L>],
) -> Result<bool> {
    let mut seen = HashSet::with_capacity(space.len());
    for cell in partition {
        for label in cell.iter() {
            if !space.contains(label) {
                return Err(Error::UnknownLabel {
                    label: format!("{label:?}"),
                });
            }
            if !seen.insert(label) {
                return Err(Error::NotAPartition);
            }
        }
    }
    if seen.len() != space.len() {
        return Err(Error::NotAPartition);
    }

    let mut by_cells = ExactRational::zero();
    for (index, cell) in partition.iter().enumerate() {
        let p_cell = prob(space, cell)?;
        if p_cell.is_zero() {
            return Err(Error::ImpossibleCell { index });
        }
        by_cells += &p_cell * conditional_expectation(space, rv, cell)?;
    }
    Ok(by_cells == expectation(space, rv)?)
}

/// `E(X_0) + Σ_i p(i) E(X_i)` for the two-stage experiment built from
/// `base` and `branch`, where `X(i, r) = X_0(i) + X_i(r)`.
///
/// The value is also computed directly over the composed space; the two
/// must agree exactly or [`Error::LawViolation`] is returned.
pub fn deferred_expectation<A: Label, B: Label>(
    base: &FiniteSpace<A>,
    base_rv: &RandomVar<A>,
    branch: &HashMap<A, FiniteSpace<B>>,
    branch_rvs: &HashMap<A, RandomVar<B>>,
) -> Result<ExactRational> {
    let mut staged = expectation(base, base_rv)?;
    for (i, p) in base.iter() {
        let second = branch.get(i).ok_or_else(|| missing(i))?;
        let rv = branch_rvs.get(i).ok_or_else(|| missing(i))?;
        staged += p * expectation(second, rv)?;
    }

    let composed = conditional_compose(base, branch)?;
    let mut combined = HashMap::with_capacity(composed.len());
    for (i, r) in composed.outcomes() {
        let value = base_rv.value(i)? + branch_rvs[i].value(r)?;
        combined.insert((i.clone(), r.clone()), value);
    }
    let direct = expectation(&composed, &RandomVar(combined))?;

    if staged != direct {
        return Err(Error::LawViolation {
            law: "principle of deferred decision",
            lhs: Box::new(direct),
            rhs: Box::new(staged),
        });
    }
    Ok(staged)
}

fn missing<A: Debug>(label: &A) -> Error {
    Error::MissingBranch {
        label: format!("{label:?}"),
    }
}

/// The coin-then-coin-or-die experiment: flip a coin; on heads flip again,
/// on tails roll a die. Returns the composed-space ingredients with the coin
/// scored heads = 0, tails = 1 and the die scored by its face.
pub fn coin_or_die() -> CoinOrDie {
    let coin = FiniteSpace::uniform(vec![Face::Heads, Face::Tails]).unwrap();
    let die = FiniteSpace::uniform((1..=6).map(Face::Pips).collect()).unwrap();
    let score = |f: &Face| match f {
        Face::Heads => integer(0),
        Face::Tails => integer(1),
        Face::Pips(k) => integer(i64::from(*k)),
    };
    let coin_rv = RandomVar::from_fn(&coin, score);
    let die_rv = RandomVar::from_fn(&die, score);
    let branch = HashMap::from([(Face::Heads, coin.clone()), (Face::Tails, die)]);
    let branch_rvs = HashMap::from([(Face::Heads, coin_rv.clone()), (Face::Tails, die_rv)]);
    CoinOrDie {
        coin,
        coin_rv,
        branch,
        branch_rvs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    Heads,
    Tails,
    Pips(u8),
}

pub struct CoinOrDie {
    pub coin: FiniteSpace<Face>,
    pub coin_rv: RandomVar<Face>,
    pub branch: HashMap<Face, FiniteSpace<Face>>,
    pub branch_rvs: HashMap<Face, RandomVar<Face>>,
}

impl CoinOrDie {
    pub fn expected_points(&self) -> Result<ExactRational> {
        deferred_expectation(&self.coin, &self.coin_rv, &self.branch, &self.branch_rvs)
    }
}
