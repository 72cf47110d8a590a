//! Rate-1/2 feedforward convolutional code with max-log BCJR decoding, rate matching,
//! CRC-16 and a seeded interleaver.

use crc::{Crc, CRC_16_IBM_3740};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LLR_CLAMP: f64 = 40.0;
pub const CRC_BITS: usize = 16;

const CRC16: Crc<u16> = Crc::<u16>::new(&CRC_16_IBM_3740);

/// Generator polynomials in octal, most significant tap on the current input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub polys: [u32; 2],
    pub constraint_length: usize,
}

impl Default for CodeSpec {
    fn default() -> Self {
        Self { polys: [0o133, 0o171], constraint_length: 7 }
    }
}

/// Trellis of a rate-1/2 code: `next[s][u]` and the two output bits `out[s][u]`.
#[derive(Clone, Debug)]
pub struct ConvCode {
    memory: usize,
    next: Vec<[usize; 2]>,
    out: Vec<[[u8; 2]; 2]>,
}

impl ConvCode {
    pub fn new(spec: &CodeSpec) -> Result<Self> {
        let k = spec.constraint_length;
        if !(2..=10).contains(&k) || spec.polys.iter().any(|&g| g == 0 || g >= 1 << k) {
            return Err(Error::InvalidConfig(format!(
                "unsupported code: constraint length {k}, generators {:o}/{:o}",
                spec.polys[0], spec.polys[1]
            )));
        }
        let memory = k - 1;
        let states = 1 << memory;
        let mut next = Vec::with_capacity(states);
        let mut out = Vec::with_capacity(states);
        for s in 0..states {
            let mut n = [0; 2];
            let mut o = [[0; 2]; 2];
            for u in 0..2 {
                let reg = (u << memory) | s;
                n[u] = reg >> 1;
                for (j, &g) in spec.polys.iter().enumerate() {
                    o[u][j] = ((reg as u32 & g).count_ones() & 1) as u8;
                }
            }
            next.push(n);
            out.push(o);
        }
        Ok(Self { memory, next, out })
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Length of the terminated mother codeword for `k` input bits.
    pub fn mother_len(&self, k: usize) -> usize {
        2 * (k + self.memory)
    }

    /// Encodes and terminates with `memory` zero bits.
    pub fn encode(&self, bits: &[u8]) -> Vec<u8> {
        let mut s = 0;
        let mut c = Vec::with_capacity(self.mother_len(bits.len()));
        for &u in bits.iter().chain(std::iter::repeat_n(&0, self.memory)) {
            let u = u as usize;
            c.extend_from_slice(&self.out[s][u]);
            s = self.next[s][u];
        }
        c
    }

    /// Max-log BCJR over a terminated trellis. `llr` holds log P(0)/P(1) per mother bit;
    /// returns the information-bit LLRs.
    pub fn decode(&self, llr: &[f64]) -> Vec<f64> {
        let steps = llr.len() / 2;
        let k = steps.saturating_sub(self.memory);
        let states = self.next.len();
        let ninf = f64::NEG_INFINITY;
        let gamma = |t: usize, o: [u8; 2]| -> f64 {
            let sign = |b: u8| if b == 0 { 0.5 } else { -0.5 };
            sign(o[0]) * llr[2 * t] + sign(o[1]) * llr[2 * t + 1]
        };
        let mut alpha = vec![ninf; (steps + 1) * states];
        alpha[0] = 0.0;
        for t in 0..steps {
            let inputs = if t < k { 2 } else { 1 };
            let (cur, nxt) = alpha.split_at_mut((t + 1) * states);
            let cur = &cur[t * states..];
            for s in 0..states {
                let a = cur[s];
                if a == ninf {
                    continue;
                }
                for u in 0..inputs {
                    let v = a + gamma(t, self.out[s][u]);
                    let n = &mut nxt[self.next[s][u]];
                    if v > *n {
                        *n = v;
                    }
                }
            }
        }
        let mut beta = vec![ninf; states];
        beta[0] = 0.0;
        let mut out = vec![0.0; k];
        let mut prev = vec![ninf; states];
        for t in (0..steps).rev() {
            let inputs = if t < k { 2 } else { 1 };
            let a = &alpha[t * states..(t + 1) * states];
            let mut best = [ninf; 2];
            for s in 0..states {
                let mut b = ninf;
                for u in 0..inputs {
                    let g = gamma(t, self.out[s][u]);
                    let bn = beta[self.next[s][u]];
                    b = b.max(g + bn);
                    if t < k && a[s] > ninf {
                        best[u] = best[u].max(a[s] + g + bn);
                    }
                }
                prev[s] = b;
            }
            std::mem::swap(&mut beta, &mut prev);
            if t < k {
                out[t] = best[0] - best[1];
            }
        }
        out
    }
}

/// Evenly spaced puncturing (target shorter than the mother code) or cyclic repetition
/// (target longer): the mother bit feeding each transmitted position.
pub fn rate_match_pattern(mother: usize, target: usize) -> Vec<usize> {
    if target <= mother {
        (0..mother).filter(|&i| (i + 1) * target / mother > i * target / mother).collect()
    } else {
        (0..target).map(|j| j % mother).collect()
    }
}

pub fn rate_match(bits: &[u8], pattern: &[usize]) -> Vec<u8> {
    pattern.iter().map(|&i| bits[i]).collect()
}

/// Inverse of [`rate_match`]: punctured positions get 0, repeated positions add up.
pub fn rate_dematch(llr: &[f64], pattern: &[usize], mother: usize) -> Vec<f64> {
    let mut m = vec![0.0; mother];
    for (&i, &l) in pattern.iter().zip(llr) {
        m[i] += l;
    }
    m
}

/// CRC-16/CCITT of a bit string (packed MSB first, zero padded).
pub fn crc16_bits(bits: &[u8]) -> [u8; CRC_BITS] {
    let bytes: Vec<u8> = bits
        .chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b & 1) << (7 - i)))
        .collect();
    let v = CRC16.checksum(&bytes);
    std::array::from_fn(|i| ((v >> (15 - i)) & 1) as u8)
}

pub fn append_crc(payload: &[u8]) -> Vec<u8> {
    let mut v = payload.to_vec();
    v.extend_from_slice(&crc16_bits(payload));
    v
}

pub fn check_crc(block: &[u8]) -> bool {
    block.len() >= CRC_BITS && crc16_bits(&block[..block.len() - CRC_BITS])[..] == block[block.len() - CRC_BITS..]
}

/// A seeded random permutation: transmitted position i carries codeword bit perm[i].
pub fn interleaver(len: usize, seed: u64, stream: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut p: Vec<usize> = (0..len).collect();
    p.shuffle(&mut rng);
    p
}

/// Payload -> CRC -> terminated code -> rate matching -> interleaving, and back.
#[derive(Clone, Debug)]
pub struct Codec {
    code: ConvCode,
    pub info_bits: usize,
    pub coded_bits: usize,
    pattern: Vec<usize>,
    perm: Vec<usize>,
}

impl Codec {
    pub fn new(spec: &CodeSpec, info_bits: usize, coded_bits: usize, seed: u64, stream: u64) -> Result<Self> {
        let code = ConvCode::new(spec)?;
        let k = info_bits + CRC_BITS;
        if k + code.memory() > coded_bits {
            return Err(Error::RateTooHigh { info_bits, coded_bits });
        }
        let pattern = rate_match_pattern(code.mother_len(k), coded_bits);
        Ok(Self { code, info_bits, coded_bits, pattern, perm: interleaver(coded_bits, seed, stream) })
    }

    pub fn encode(&self, payload: &[u8]) -> Vec<u8> {
        let matched = rate_match(&self.code.encode(&append_crc(payload)), &self.pattern);
        self.perm.iter().map(|&i| matched[i]).collect()
    }

    /// Decodes interleaved LLRs; returns (payload hard decisions, CRC passed).
    pub fn decode(&self, llr: &[f64]) -> (Vec<u8>, bool) {
        let mut matched = vec![0.0; self.coded_bits];
        for (&i, &l) in self.perm.iter().zip(llr) {
            matched[i] = l;
        }
        let mother = rate_dematch(&matched, &self.pattern, self.code.mother_len(self.info_bits + CRC_BITS));
        let bits: Vec<u8> = self.code.decode(&mother).iter().map(|&l| u8::from(l < 0.0)).collect();
        let ok = check_crc(&bits);
        (bits[..self.info_bits].to_vec(), ok)
    }
}
