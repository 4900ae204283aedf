//! Seeded generators of small random spaces with events and random
//! variables over them, plus one-shot witnesses of each composition law on a random instance.
//!
//! Spaces have 1 to `MAX_OUTCOMES` outcomes labelled `0..k`; weights are
//! random positive integers divided by their sum, so normalization is exact
//! by construction.

use std::collections::HashMap;

use num::Zero;
use rand::Rng;

use super::{
    check_total_expectation, conditional_compose, conditional_prob, deferred_expectation,
    embed_first, embed_second, expectation, make_space, prob, product, ratio, Event, ExactRational,
    FiniteSpace, RandomVar,
};
use crate::error::Result;

pub const MAX_OUTCOMES: u32 = 6;

pub fn random_space<R: Rng>(rng: &mut R) -> FiniteSpace<u32> {
    let k = rng.random_range(1..=MAX_OUTCOMES);
    let raw: Vec<i64> = (0..k).map(|_| rng.random_range(1..=24)).collect();
    let total: i64 = raw.iter().sum();
    let weights = raw.iter().map(|&w| ratio(w, total)).collect();
    make_space((0..k).collect(), weights).expect("normalized by construction")
}

pub fn random_event<R: Rng>(rng: &mut R, space: &FiniteSpace<u32>) -> Event<u32> {
    space.event_where(|_| rng.random_bool(0.5))
}

pub fn random_rv<R: Rng>(rng: &mut R, space: &FiniteSpace<u32>) -> RandomVar<u32> {
    RandomVar::from_fn(space, |_| {
        ratio(rng.random_range(-20..=20), rng.random_range(1..=9))
    })
}

/// Splits the outcomes into random non-empty cells. Every weight drawn by
/// [`random_space`] is positive, so every cell has positive probability.
pub fn random_partition<R: Rng>(rng: &mut R, space: &FiniteSpace<u32>) -> Vec<Event<u32>> {
    let cells = rng.random_range(1..=space.len());
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); cells];
    for (slot, label) in space.outcomes().iter().enumerate() {
        // the first `cells` outcomes seed one cell each
        let cell = if slot < cells {
            slot
        } else {
            rng.random_range(0..cells)
        };
        members[cell].push(*label);
    }
    members.into_iter().map(Event::new).collect()
}

pub struct Branching {
    pub base: FiniteSpace<u32>,
    pub base_rv: RandomVar<u32>,
    pub branch: HashMap<u32, FiniteSpace<u32>>,
    pub branch_rvs: HashMap<u32, RandomVar<u32>>,
}

pub fn random_branching<R: Rng>(rng: &mut R) -> Branching {
    let base = random_space(rng);
    let base_rv = random_rv(rng, &base);
    let mut branch = HashMap::new();
    let mut branch_rvs = HashMap::new();
    for &i in base.outcomes() {
        let second = random_space(rng);
        branch_rvs.insert(i, random_rv(rng, &second));
        branch.insert(i, second);
    }
    Branching {
        base,
        base_rv,
        branch,
        branch_rvs,
    }
}

/// `p(e1(A)) = p1(A)`, `p(e2(B)) = p2(B)` and `p(e1(A) ∩ e2(B)) = p1(A) p2(B)`.
pub fn product_independence_holds<R: Rng>(rng: &mut R) -> Result<bool> {
    let (s1, s2) = (random_space(rng), random_space(rng));
    let (a, b) = (random_event(rng, &s1), random_event(rng, &s2));
    let joint = product(&s1, &s2);
    let (ea, eb) = (embed_first(&a, &s2), embed_second(&s1, &b));
    let (pa, pb) = (prob(&s1, &a)?, prob(&s2, &b)?);
    Ok(prob(&joint, &ea)? == pa
        && prob(&joint, &eb)? == pb
        && prob(&joint, &ea.intersection(&eb))? == pa * pb)
}

/// `E(X1 + X2)` over `S1 × S2` equals `E(X1) + E(X2)`.
pub fn sum_additivity_holds<R: Rng>(rng: &mut R) -> Result<bool> {
    let (s1, s2) = (random_space(rng), random_space(rng));
    let (x1, x2) = (random_rv(rng, &s1), random_rv(rng, &s2));
    let joint = product(&s1, &s2);
    let sum = RandomVar::from_fn(&joint, |(a, b)| x1.get(a).unwrap() + x2.get(b).unwrap());
    Ok(expectation(&joint, &sum)? == expectation(&s1, &x1)? + expectation(&s2, &x2)?)
}

/// In a composed space, `q(e1(i)) = p(i)` and `q(e2(A) | e1(i)) = p_i(A)`.
pub fn compose_conditioning_holds<R: Rng>(rng: &mut R) -> Result<bool> {
    let Branching { base, branch, .. } = random_branching(rng);
    let composed = conditional_compose(&base, &branch)?;
    for (&i, p) in base.iter() {
        let second = &branch[&i];
        let a = random_event(rng, second);
        let e1 = composed.event_where(|(j, _)| *j == i);
        let e2: Event<(u32, u32)> = a.iter().map(|&r| (i, r)).collect();
        let pa = prob(second, &a)?;
        if prob(&composed, &e1)? != *p
            || prob(&composed, &e2)? != p * &pa
            || conditional_prob(&composed, &e2, &e1)? != pa
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both evaluation orders of the deferred-decision expectation agree.
pub fn deferred_decision_holds<R: Rng>(rng: &mut R) -> Result<bool> {
    let b = random_branching(rng);
    match deferred_expectation(&b.base, &b.base_rv, &b.branch, &b.branch_rvs) {
        Ok(_) => Ok(true),
        Err(crate::Error::LawViolation { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn total_expectation_holds<R: Rng>(rng: &mut R) -> Result<bool> {
    let space = random_space(rng);
    let rv = random_rv(rng, &space);
    let partition = random_partition(rng, &space);
    check_total_expectation(&space, &rv, &partition)
}

/// Sum of the weights, recomputed from scratch.
pub fn total_weight<L: super::Label>(space: &FiniteSpace<L>) -> ExactRational {
    space
        .weights()
        .iter()
        .fold(ExactRational::zero(), |acc, w| acc + w)
}
