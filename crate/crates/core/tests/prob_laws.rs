use num::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use quickspace::prob_core::{
    conditional_prob, expectation, make_space, normalization_audit, prob, product, ratio, sample,
    Event, ExactRational, FiniteSpace,
};

fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn product_is_independent(seed in any::<u64>()) {
        prop_assert!(sample::product_independence_holds(&mut rng(seed)).unwrap());
    }

    #[test]
    fn expectation_is_additive(seed in any::<u64>()) {
        prop_assert!(sample::sum_additivity_holds(&mut rng(seed)).unwrap());
    }

    #[test]
    fn composition_conditions_on_base(seed in any::<u64>()) {
        prop_assert!(sample::compose_conditioning_holds(&mut rng(seed)).unwrap());
    }

    #[test]
    fn deferred_decision(seed in any::<u64>()) {
        prop_assert!(sample::deferred_decision_holds(&mut rng(seed)).unwrap());
    }

    #[test]
    fn total_expectation(seed in any::<u64>()) {
        prop_assert!(sample::total_expectation_holds(&mut rng(seed)).unwrap());
    }

    #[test]
    fn random_spaces_are_normalized(seed in any::<u64>()) {
        let space = sample::random_space(&mut rng(seed));
        prop_assert!(space.len() as u32 <= sample::MAX_OUTCOMES);
        prop_assert_eq!(sample::total_weight(&space), ExactRational::one());
        prop_assert!(space.weights().iter().all(|w| *w > ExactRational::zero()));
    }

    #[test]
    fn event_probability_is_complementary(seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = sample::random_space(&mut r);
        let a = sample::random_event(&mut r, &space);
        let rest: Event<u32> = space.outcomes().iter().filter(|o| !a.contains(o)).cloned().collect();
        prop_assert_eq!(prob(&space, &a).unwrap() + prob(&space, &rest).unwrap(), ExactRational::one());
    }

    #[test]
    fn integer_weights_normalize(weights in prop::collection::vec(1i64..50, 1..8)) {
        let total: i64 = weights.iter().sum();
        let outcomes: Vec<usize> = (0..weights.len()).collect();
        let exact = weights.iter().map(|&w| ratio(w, total)).collect();
        let space = make_space(outcomes, exact).unwrap();
        prop_assert_eq!(sample::total_weight(&space), ExactRational::one());
    }

    #[test]
    fn unnormalized_weights_rejected(weights in prop::collection::vec(1i64..50, 1..8), extra in 1i64..50) {
        let total: i64 = weights.iter().sum::<i64>() + extra;
        let outcomes: Vec<usize> = (0..weights.len()).collect();
        let exact = weights.iter().map(|&w| ratio(w, total)).collect();
        prop_assert!(make_space(outcomes, exact).is_err());
    }
}

#[test]
fn conditioning_on_uniform_die() {
    let die = FiniteSpace::uniform((1..=6u8).collect()).unwrap();
    let even: Event<u8> = [2, 4, 6].into_iter().collect();
    let high: Event<u8> = [4, 5, 6].into_iter().collect();
    assert_eq!(conditional_prob(&die, &high, &even).unwrap(), ratio(2, 3));

    let pair = product(&die, &die);
    assert_eq!(pair.len(), 36);
    let sum = quickspace::prob_core::RandomVar::from_fn(&pair, |(a, b)| ratio((a + b) as i64, 1));
    assert_eq!(expectation(&pair, &sum).unwrap(), ratio(7, 1));
    assert_eq!(normalization_audit().violations, 0);
}
