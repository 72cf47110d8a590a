//! Channel models against closed-form mutual informations.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swsc::channels::{discretize_gaussian, make_4pam_natural, make_single, Channel, Constellation, DiscreteIc, GaussianIc, Pmf};
use swsc::corpus::random_discrete_ic;
use swsc::mi::MiCache;
use swsc::regions::IcInfo;

/// Binary uniform inputs with Y1 = X xor W and Y2 = W.
fn xor_channel() -> DiscreteIc {
    let mut law = Vec::new();
    for x in 0..2 {
        for w in 0..2 {
            for y1 in 0..2 {
                for y2 in 0..2 {
                    law.push(f64::from(u8::from(y1 == x ^ w && y2 == w)));
                }
            }
        }
    }
    DiscreteIc::new([2, 2, 2, 2], law, Pmf::uniform(2), Pmf::uniform(2)).unwrap()
}

/// I(X;Y) of BPSK at amplitude g in unit-variance noise: 1 - E[log2(1 + exp(-2 g y))],
/// y = g + z, by a fine trapezoid rule.
fn bpsk_mi(g: f64) -> f64 {
    let (lo, hi, n) = (-12.0, 12.0, 200_000);
    let h = (hi - lo) / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let z: f64 = lo + i as f64 * h;
        let phi = (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let f = phi * (1.0 + (-2.0 * g * (g + z)).exp()).log2();
        s += if i == 0 || i == n { 0.5 * f } else { f };
    }
    1.0 - s * h
}

#[test]
fn xor_channel_information() {
    let info = IcInfo::new(&MiCache::new(xor_channel().to_joint())).unwrap();
    let r = info.rx[0];
    assert!(r.own.abs() < 1e-12);
    assert!(r.other.abs() < 1e-12);
    assert!((r.own_given - 1.0).abs() < 1e-12);
    assert!((r.both - 1.0).abs() < 1e-12);
    let r = info.rx[1];
    assert!((r.own - 1.0).abs() < 1e-12);
    assert!(r.other_given.abs() < 1e-12);
}

#[test]
fn bpsk_without_interference_matches_integral() {
    for snr_db in [0.0, 4.0, 8.0] {
        let ic = GaussianIc::from_db(snr_db, f64::NEG_INFINITY, snr_db, f64::NEG_INFINITY, 0.0).unwrap();
        let bpsk = make_single(Constellation::bpsk());
        let ch = discretize_gaussian(&ic, &bpsk, &bpsk, 64).unwrap();
        let info = IcInfo::new(&MiCache::new(ch)).unwrap();
        let want = bpsk_mi(10f64.powf(snr_db / 20.0));
        assert!((info.rx[0].own - want).abs() < 1e-6, "{snr_db} dB: {} vs {want}", info.rx[0].own);
        assert!(info.rx[0].other.abs() < 1e-9);
    }
}

#[test]
fn natural_4pam_has_unit_power() {
    let m = make_4pam_natural();
    assert_eq!(m.num_layers(), 2);
    assert!((m.mean_power() - 1.0).abs() < 1e-12);
    let mut pts: Vec<f64> = m.output_points().iter().map(|p| p[0].re * 5f64.sqrt()).collect();
    pts.sort_by(f64::total_cmp);
    for (p, want) in pts.iter().zip([-3.0, -1.0, 1.0, 3.0]) {
        assert!((p - want).abs() < 1e-12);
    }
}

#[test]
fn channel_json_rejects_bad_laws() {
    let bad = r#"{"type":"discrete","law":[[[[0.5,0.6]]]],"px":[1.0],"pw":[1.0]}"#;
    assert!(Channel::from_json(bad).is_err());
    assert!(Channel::from_json(r#"{"type":"gaussian","snr_db":8}"#).is_err());
    assert!(Pmf::new(vec![0.5, 0.4]).is_err());
    assert!(Pmf::new(vec![1.2, -0.2]).is_err());
}

#[test]
fn symmetric_gaussian_is_symmetric() {
    let ch = Channel::from_json(r#"{"type":"gaussian","snr_db":8,"inr_db":8,"x_map":"bpsk","w_map":"bpsk"}"#).unwrap();
    let info = IcInfo::new(&MiCache::new(ch.to_joint().unwrap())).unwrap();
    assert!((info.rx[0].own - info.rx[1].own).abs() < 1e-12);
    assert!((info.rx[0].both - info.rx[1].both).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_rule_holds_on_random_channels(seed in any::<u64>()) {
        let ic = random_discrete_ic(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        let info = IcInfo::new(&MiCache::new(ic.to_joint())).unwrap();
        for r in info.rx {
            prop_assert!((r.own + r.other_given - r.both).abs() < 1e-12);
            prop_assert!((r.other + r.own_given - r.both).abs() < 1e-12);
            // Independent inputs: conditioning on the other input cannot hurt.
            prop_assert!(r.own_given >= r.own - 1e-12);
            prop_assert!(r.own >= -1e-12 && r.other >= -1e-12);
        }
    }

    #[test]
    fn spec_roundtrip_preserves_information(seed in any::<u64>()) {
        let ic = random_discrete_ic(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        let json = serde_json::to_string(&ic.to_spec()).unwrap();
        let back = Channel::from_json(&json).unwrap().to_joint().unwrap();
        let a = IcInfo::new(&MiCache::new(ic.to_joint())).unwrap();
        let b = IcInfo::new(&MiCache::new(back)).unwrap();
        prop_assert!((a.rx[0].both - b.rx[0].both).abs() < 1e-12);
        prop_assert!((a.rx[1].own_given - b.rx[1].own_given).abs() < 1e-12);
    }
}
