//! Link simulator components against hand-computed oracles.

use proptest::prelude::*;
use swsc::simulator::{
    crc16_bits, demap_llr, interleaver, rate_match_pattern, simulate, BlockSchedule, CodeSpec, Codec,
    LayeredReceiver, SimConfig, LLR_CLAMP,
};

fn bits_of(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|b| (0..8).map(move |i| b >> (7 - i) & 1)).collect()
}

/// Noiseless LLRs: bit 0 maps to a positive value.
fn clean_llr(bits: &[u8], mag: f64) -> Vec<f64> {
    bits.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
}

#[test]
fn crc_check_value() {
    let c = crc16_bits(&bits_of(b"123456789"));
    let v = c.iter().fold(0u16, |acc, &b| acc << 1 | u16::from(b));
    assert_eq!(v, 0x29B1);
}

#[test]
fn bpsk_demapping_is_linear() {
    // Means +-g: log N(y; g) / N(y; -g) = 2 g y / sigma2.
    let (g, s2) = (0.8, 0.5);
    let rx = LayeredReceiver::new(1, vec![g, -g], s2);
    let y = [0.3, -1.1, 0.0, 40.0];
    let llr = demap_llr(&rx, &y, &[None], 0);
    for (l, &yt) in llr.iter().zip(&y) {
        let want: f64 = (2.0 * g * yt / s2).clamp(-LLR_CLAMP, LLR_CLAMP);
        assert!((l - want).abs() < 1e-12, "{l} vs {want}");
    }
}

#[test]
fn known_layer_is_substituted() {
    // Two layers with means (b0, b1) -> (1 - 2 b0) + 2 (1 - 2 b1): knowing layer 1 leaves a
    // BPSK problem on layer 0 shifted by the known term.
    let means: Vec<f64> = (0..4).map(|i| (1 - 2 * (i >> 1)) as f64 + 2.0 * (1 - 2 * (i & 1)) as f64).collect();
    let rx = LayeredReceiver::new(2, means, 1.0);
    let known = [1u8];
    let y = [0.7];
    let llr = demap_llr(&rx, &y, &[None, Some(&known)], 0);
    let shifted = y[0] + 2.0;
    assert!((llr[0] - 2.0 * shifted).abs() < 1e-12);
}

#[test]
fn codec_corrects_scattered_errors() {
    let codec = Codec::new(&CodeSpec::default(), 200, 2 * (200 + 16 + 6), 5, 0).unwrap();
    let payload: Vec<u8> = (0..200).map(|i| (i * 7 % 3 == 0) as u8).collect();
    let tx = codec.encode(&payload);
    let mut llr = clean_llr(&tx, 4.0);
    for i in [10, 90, 200, 330] {
        llr[i] = -llr[i];
    }
    let (dec, ok) = codec.decode(&llr);
    assert!(ok);
    assert_eq!(dec, payload);
}

#[test]
fn schedules_follow_the_block_tables() {
    let two = BlockSchedule::new(2, 5).unwrap().table(1, "X");
    assert_eq!(two, "block\t1\t2\t3\t4\t5\nX1\t1\tm1(1)\tm1(2)\tm1(3)\tm1(4)\nX2\tm1(1)\tm1(2)\tm1(3)\tm1(4)\t1\n");
    let three = BlockSchedule::new(3, 5).unwrap().table(1, "X");
    assert_eq!(
        three,
        "block\t1\t2\t3\t4\t5\nX1\t1\t1\tm1(1)\tm1(2)\tm1(3)\nX2\t1\tm1(1)\tm1(2)\tm1(3)\t1\nX3\tm1(1)\tm1(2)\tm1(3)\t1\t1\n"
    );
    assert!(BlockSchedule::new(3, 2).is_err());
}

#[test]
fn config_json_defaults_and_rejections() {
    let c = SimConfig::from_json(r#"{"trials": 3}"#).unwrap();
    assert_eq!((c.n, c.b, c.trials), (1024, 12, 3));
    assert!(SimConfig::from_json(r#"{"trails": 3}"#).is_err());
    assert!(SimConfig::from_json(r#"{"rates": [3.0, 0.5]}"#).and_then(|c| c.validate()).is_err());
}

#[test]
fn high_snr_link_delivers_everything() {
    let cfg = SimConfig { n: 256, b: 5, trials: 3, snr_db: 40.0, inr_db: 40.0, rates: [0.5, 0.4], ..Default::default() };
    let r = simulate(&cfg).unwrap();
    for s in &r.swsc.streams {
        assert_eq!(s.errors, 0);
    }
    // Sender 1 has two layers, so 4 of 5 blocks carry a message; sender 2 uses all 5.
    assert_eq!(r.swsc.streams[0].messages, 3 * 4);
    assert_eq!(r.swsc.streams[1].messages, 3 * 5);
}

#[test]
fn seeded_simulations_are_identical() {
    let cfg = SimConfig { n: 128, b: 4, trials: 4, snr_db: 5.0, inr_db: 5.0, master_seed: 7, ..Default::default() };
    let a = serde_json::to_string(&simulate(&cfg).unwrap().swsc).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| serde_json::to_string(&simulate(&cfg).unwrap().swsc).unwrap());
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn codec_roundtrips_noiselessly(
        payload in prop::collection::vec(0u8..2, 8..120),
        extra in 0usize..200,
        seed in any::<u64>(),
    ) {
        let coded = payload.len() + 16 + 6 + extra;
        let codec = Codec::new(&CodeSpec::default(), payload.len(), coded, seed, 1).unwrap();
        let tx = codec.encode(&payload);
        prop_assert_eq!(tx.len(), coded);
        let (dec, ok) = codec.decode(&clean_llr(&tx, 10.0));
        prop_assert!(ok);
        prop_assert_eq!(dec, payload);
    }

    #[test]
    fn rate_matching_patterns_are_well_formed(mother in 1usize..500, target in 1usize..1000) {
        let p = rate_match_pattern(mother, target);
        prop_assert_eq!(p.len(), target);
        prop_assert!(p.iter().all(|&i| i < mother));
        if target <= mother {
            prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn interleavers_are_permutations(len in 1usize..400, seed in any::<u64>(), stream in 0u64..4) {
        let mut p = interleaver(len, seed, stream);
        p.sort_unstable();
        prop_assert!(p.iter().enumerate().all(|(i, &v)| i == v));
    }
}
