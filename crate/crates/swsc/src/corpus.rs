//! Seeded channel families used by the property suites and acceptance checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::channels::{
    discretize_gaussian, make_4pam_natural, make_single, Constellation, DiscreteIc,
    DiscreteReceiver, GaussianIc, JointChannel, Pmf, Receiver,
};
use crate::error::Result;

/// Seed of the bundled discrete corpus.
pub const CORPUS_SEED: u64 = 20_170_601;

/// Uniform draw from the probability simplex (normalized exponentials).
fn simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Input law bounded away from zero: half uniform, half random.
fn input_pmf(rng: &mut ChaCha8Rng, n: usize) -> Pmf {
    let v: Vec<f64> = simplex(rng, n).into_iter().map(|q| 0.5 / n as f64 + 0.5 * q).collect();
    let s: f64 = v.iter().sum();
    Pmf::new(v.into_iter().map(|q| q / s).collect()).expect("normalized")
}

/// Random channel rows, sharpened (cubed and renormalized) so that the corpus has
/// informative channels rather than near-uniform ones.
fn rows(rng: &mut ChaCha8Rng, count: usize, n: usize) -> Vec<f64> {
    (0..count)
        .flat_map(|_| {
            let v: Vec<f64> = simplex(rng, n).into_iter().map(|q| q.powi(3)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(move |q| q / s)
        })
        .collect()
}

/// A random interference channel with all alphabets in 2..=max_alphabet.
pub fn random_discrete_ic(rng: &mut ChaCha8Rng, max_alphabet: usize) -> DiscreteIc {
    let mut size = || rng.random_range(2..=max_alphabet.max(2));
    let (nx, nw, ny1, ny2) = (size(), size(), size(), size());
    let law1 = rows(rng, nx * nw, ny1);
    let law2 = rows(rng, nx * nw, ny2);
    let (px, pw) = (input_pmf(rng, nx), input_pmf(rng, nw));
    DiscreteIc::from_marginals(&law1, &law2, ny1, ny2, px, pw).expect("valid random channel")
}

/// `count` random channels with alphabets of at most 4, from one seed.
pub fn discrete_corpus(seed: u64, count: usize) -> Vec<DiscreteIc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_discrete_ic(&mut rng, 4)).collect()
}

/// A random three-user MAC p(y|a,b,c) with input alphabets 2..=3 and output 2..=4.
pub fn random_mac3(rng: &mut ChaCha8Rng) -> JointChannel {
    let inputs: Vec<Pmf> = (0..3)
        .map(|_| {
            let n = rng.random_range(2..=3);
            input_pmf(rng, n)
        })
        .collect();
    let ny = rng.random_range(2..=4);
    let tuples: usize = inputs.iter().map(Pmf::len).product();
    let law = rows(rng, tuples, ny);
    JointChannel::discrete_mac(inputs, ny, law).expect("valid random MAC")
}

pub fn mac3_corpus(seed: u64, count: usize) -> Vec<JointChannel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_mac3(&mut rng)).collect()
}

/// A tiny Han-Kobayashi channel: binary uniform inputs S, T (sender 1) and U, V
/// (sender 2), ternary outputs with a random law p(y1, y2 | s, t, u, v) in which every
/// input affects both outputs.
pub fn tiny_hk(seed: u64) -> JointChannel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = vec![Pmf::uniform(2); 4];
    let receivers = (0..2)
        .map(|_| Receiver::Discrete(DiscreteReceiver { outputs: 3, law: rows(&mut rng, 16, 3) }))
        .collect();
    JointChannel::new(inputs, receivers).expect("valid random HK channel")
}

/// Symmetric Gaussian interference channel with 4PAM (natural labeling) at sender 1 and
/// BPSK at sender 2.
pub fn gaussian_4pam_bpsk(snr_db: f64, inr_db: f64, nodes: usize) -> Result<JointChannel> {
    let ic = GaussianIc::symmetric(snr_db, inr_db)?;
    discretize_gaussian(&ic, &make_4pam_natural(), &make_single(Constellation::bpsk()), nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seeded_and_small() {
        let a = discrete_corpus(CORPUS_SEED, 20);
        let b = discrete_corpus(CORPUS_SEED, 20);
        assert_eq!(a, b);
        assert!(a.iter().all(|ic| ic.sizes().iter().all(|&n| (2..=4).contains(&n))));
    }

    #[test]
    fn spec_roundtrip() {
        let ic = &discrete_corpus(7, 1)[0];
        let json = serde_json::to_string(&ic.to_spec()).unwrap();
        let back = crate::channels::Channel::from_json(&json).unwrap();
        let crate::channels::Channel::Discrete(d) = back else { panic!() };
        assert!(d.law().iter().zip(ic.law()).all(|(a, b)| (a - b).abs() < 1e-15));
    }
}
