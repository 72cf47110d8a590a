//! Mutual-information engine against closed forms and chain-rule identities.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swsc::channels::{DiscreteReceiver, JointChannel, Pmf, Receiver};
use swsc::corpus::random_discrete_ic;
use swsc::mi::{chain_rule_check, mutual_info, LayerRef, Mi, MiCache, MiQuery};
use swsc::splits::{compose_three_layer, erasure_split, LayerSplit, SenderSplit};

/// Binary erasure channel with erasure probability e, one input.
fn bec(p: &[f64], e: f64) -> JointChannel {
    let mut law = Vec::new();
    for x in 0..2 {
        for y in 0..3 {
            law.push(if y == 2 { e } else if y == x { 1.0 - e } else { 0.0 });
        }
    }
    JointChannel::new(
        vec![Pmf::new(p.to_vec()).unwrap()],
        vec![Receiver::Discrete(DiscreteReceiver { outputs: 3, law })],
    )
    .unwrap()
}

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[test]
fn erasure_channel_capacity_expression() {
    for (q, e) in [(0.5, 0.25), (0.3, 0.6), (0.9, 0.0)] {
        let ch = bec(&[q, 1.0 - q], e);
        let split = LayerSplit::trivial(&[ch.input_pmf(0).clone()]);
        let q_all = MiQuery { target: vec![LayerRef::new(0, 0)], given: vec![], receiver: 0 };
        let got = mutual_info(&ch, &split, &q_all).unwrap();
        assert!((got - (1.0 - e) * h2(q)).abs() < 1e-12, "{got}");
    }
}

#[test]
fn layer_of_an_erasure_split_sees_an_erased_input() {
    // X1 is X erased with probability a, so I(X1; Y) over a clean channel is (1 - a) H(X).
    let ch = bec(&[0.5, 0.5], 0.0);
    let a = 0.35;
    let split = LayerSplit::new(vec![erasure_split(ch.input_pmf(0), a).unwrap()]);
    let cache = MiCache::new(ch);
    let mi = Mi::new(&cache, &split).unwrap();
    assert!((mi.cond_mi(0, &[0b01], &[0]) - (1.0 - a)).abs() < 1e-12);
    assert!((mi.cond_mi(0, &[0b10], &[0b01]) - a).abs() < 1e-12);
}

#[test]
fn queries_validate_layers_and_overlap() {
    let ch = bec(&[0.5, 0.5], 0.1);
    let split = LayerSplit::trivial(&[ch.input_pmf(0).clone()]);
    let cache = MiCache::new(ch);
    let mi = Mi::new(&cache, &split).unwrap();
    let bad = MiQuery { target: vec![LayerRef::new(0, 3)], given: vec![], receiver: 0 };
    assert!(mi.query(&bad).is_err());
    let overlap = MiQuery { target: vec![LayerRef::new(0, 0)], given: vec![LayerRef::new(0, 0)], receiver: 0 };
    assert!(mi.query(&overlap).is_err());
    let rx = MiQuery { target: vec![LayerRef::new(0, 0)], given: vec![], receiver: 4 };
    assert!(mi.query(&rx).is_err());
}

#[test]
fn cache_is_shared_across_splits() {
    let ic = random_discrete_ic(&mut ChaCha8Rng::seed_from_u64(3), 3);
    let cache = MiCache::new(ic.to_joint());
    let split = LayerSplit::trivial(&[ic.px().clone(), ic.pw().clone()]);
    let mi = Mi::new(&cache, &split).unwrap();
    let first = mi.cond_mi(0, &[1, 0], &[0, 1]);
    let n = cache.len();
    assert!(n > 0);
    assert_eq!(mi.cond_mi(0, &[1, 0], &[0, 1]), first);
    assert_eq!(cache.len(), n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_rule_over_three_layers(seed in any::<u64>(), a in 0.0..=1.0f64, b in 0.0..=1.0f64, k in 0usize..2) {
        let ic = random_discrete_ic(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        let three = compose_three_layer(ic.px(), a, b).unwrap();
        let split = LayerSplit::new(vec![three.split, SenderSplit::trivial(ic.pw().clone())]);
        let cache = MiCache::new(ic.to_joint());
        let mi = Mi::new(&cache, &split).unwrap();
        let order = [LayerRef::new(0, 0), LayerRef::new(0, 1), LayerRef::new(0, 2)];
        prop_assert!(chain_rule_check(&mi, &order, k).unwrap() < 1e-12);
        let rev = [LayerRef::new(0, 2), LayerRef::new(0, 0), LayerRef::new(0, 1)];
        prop_assert!(chain_rule_check(&mi, &rev, k).unwrap() < 1e-12);
    }

    #[test]
    fn coarse_layer_carries_less(seed in any::<u64>(), a in 0.0..=1.0f64) {
        let ic = random_discrete_ic(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        let split = LayerSplit::new(vec![erasure_split(ic.px(), a).unwrap(), SenderSplit::trivial(ic.pw().clone())]);
        let cache = MiCache::new(ic.to_joint());
        let mi = Mi::new(&cache, &split).unwrap();
        for k in 0..2 {
            let coarse = mi.cond_mi(k, &[0b01, 0], &[0, 0]);
            let full = mi.cond_mi(k, &[0b11, 0], &[0, 0]);
            prop_assert!(coarse <= full + 1e-12);
            prop_assert!(coarse >= -1e-12);
        }
    }
}
