//! Conditional mutual information between groups of layers.
//!
//! Every rate expression reduces to I(A; Y_k | B) = H(Y_k | B) - H(Y_k | A, B), where A and B
//! are sets of layers and all other layers act as noise. Because layers of different
//! senders are independent, H(Y_k | B) is a mixture over the per-sender conditional laws
//! p(x | known layers of x), so only output entropies of product input laws are needed.
//! Those are memoized in a [`MiCache`] shared by every split of the same channel.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::channels::{JointChannel, Receiver};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::splits::{Decomposition, LayerSplit};

/// A layer of one channel input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LayerRef {
    pub input: usize,
    pub layer: usize,
}

impl LayerRef {
    pub fn new(input: usize, layer: usize) -> Self {
        Self { input, layer }
    }
}

/// I(target; Y_receiver | given) with the remaining layers marginalized.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MiQuery {
    pub target: Vec<LayerRef>,
    pub given: Vec<LayerRef>,
    pub receiver: usize,
}

/// Output entropies of a channel, keyed by receiver and per-input law.
#[derive(Debug)]
pub struct MiCache {
    channel: JointChannel,
    entropies: Mutex<HashMap<(usize, Vec<u64>), (f64, f64)>>,
}

impl MiCache {
    pub fn new(channel: JointChannel) -> Self {
        Self { channel, entropies: Mutex::new(HashMap::new()) }
    }

    pub fn channel(&self) -> &JointChannel {
        &self.channel
    }

    /// Number of memoized entropies.
    pub fn len(&self) -> usize {
        self.entropies.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entropy of receiver `k` when input i has law `laws[i]`, independently across inputs.
    pub fn product_entropy(&self, k: usize, laws: &[&[f64]]) -> (f64, f64) {
        let gaussian = matches!(self.channel.receiver(k), Receiver::Gaussian(_));
        let key: Vec<u64> = laws
            .iter()
            .flat_map(|l| l.iter())
            .map(|&v| if gaussian { (v * (1u64 << 40) as f64).round() as u64 } else { v.to_bits() })
            .collect();
        if let Some(&h) = self.entropies.lock().unwrap().get(&(k, key.clone())) {
            return h;
        }
        let mut weights = vec![1.0];
        for law in laws {
            weights = weights
                .iter()
                .flat_map(|&w| law.iter().map(move |&q| w * q))
                .collect();
        }
        let h = match self.channel.receiver(k) {
            Receiver::Gaussian(g) => g.mixture_entropy_with_error(&weights),
            Receiver::Discrete(_) => (self.channel.output_entropy(k, &weights), 0.0),
        };
        self.entropies.lock().unwrap().insert((k, key), h);
        h
    }
}

/// Mutual-information evaluator for one split of a cached channel.
#[derive(Debug)]
pub struct Mi<'a> {
    cache: &'a MiCache,
    split: &'a LayerSplit,
    decomps: Mutex<HashMap<(usize, u64), Arc<Decomposition>>>,
}

impl<'a> Mi<'a> {
    /// The split must have one sender split per input, with matching alphabets and
    /// targets equal to the channel's input pmfs within the pushforward tolerance.
    pub fn new(cache: &'a MiCache, split: &'a LayerSplit) -> Result<Self> {
        let ch = cache.channel();
        if split.num_inputs() != ch.num_inputs() {
            return Err(Error::InvalidParameter(format!(
                "split has {} inputs, channel has {}",
                split.num_inputs(),
                ch.num_inputs()
            )));
        }
        for (i, s) in split.inputs().iter().enumerate() {
            let p = ch.input_pmf(i).probs();
            let t = s.target().probs();
            if p.len() != t.len()
                || p.iter().zip(t).any(|(a, b)| (a - b).abs() > Tolerances::DEFAULT.pushforward)
            {
                return Err(Error::InvalidParameter(format!(
                    "split target of input {i} differs from the channel input law"
                )));
            }
        }
        Ok(Self { cache, split, decomps: Mutex::new(HashMap::new()) })
    }

    pub fn split(&self) -> &LayerSplit {
        self.split
    }

    pub fn cache(&self) -> &MiCache {
        self.cache
    }

    fn decomposition(&self, input: usize, mask: u64) -> Arc<Decomposition> {
        if let Some(d) = self.decomps.lock().unwrap().get(&(input, mask)) {
            return d.clone();
        }
        let d = Arc::new(self.split.input(input).decompose(mask));
        self.decomps.lock().unwrap().insert((input, mask), d.clone());
        d
    }

    /// H(Y_k | layers in `masks`), with its Monte Carlo standard error (0 otherwise).
    pub fn entropy_with_error(&self, k: usize, masks: &[u64]) -> (f64, f64) {
        let decs: Vec<Arc<Decomposition>> =
            masks.iter().enumerate().map(|(i, &m)| self.decomposition(i, m)).collect();
        let mut idx = vec![0usize; decs.len()];
        let (mut h, mut var) = (0.0, 0.0);
        loop {
            let prob: f64 = idx.iter().zip(&decs).map(|(&j, d)| d[j].0).product();
            let laws: Vec<&[f64]> = idx.iter().zip(&decs).map(|(&j, d)| d[j].1.as_slice()).collect();
            let (e, se) = self.cache.product_entropy(k, &laws);
            h += prob * e;
            var += (prob * se).powi(2);
            // Odometer over the decomposition product.
            let mut pos = decs.len();
            loop {
                if pos == 0 {
                    return (h, var.sqrt());
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < decs[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub fn entropy(&self, k: usize, masks: &[u64]) -> f64 {
        self.entropy_with_error(k, masks).0
    }

    /// I(target; Y_k | given) over layer masks (one mask per input).
    pub fn cond_mi(&self, k: usize, target: &[u64], given: &[u64]) -> f64 {
        let both: Vec<u64> = target.iter().zip(given).map(|(a, b)| a | b).collect();
        self.entropy(k, given) - self.entropy(k, &both)
    }

    /// Masks from layer references, validating indices.
    pub fn masks(&self, refs: &[LayerRef]) -> Result<Vec<u64>> {
        let mut m = vec![0u64; self.split.num_inputs()];
        for r in refs {
            if r.input >= self.split.num_inputs() || r.layer >= self.split.input(r.input).num_layers() {
                return Err(Error::InvalidLayer { input: r.input, layer: r.layer });
            }
            m[r.input] |= 1 << r.layer;
        }
        Ok(m)
    }

    pub fn query_with_error(&self, q: &MiQuery) -> Result<(f64, f64)> {
        if q.receiver >= self.cache.channel().num_receivers() {
            return Err(Error::InvalidParameter(format!("receiver {} does not exist", q.receiver)));
        }
        let t = self.masks(&q.target)?;
        let g = self.masks(&q.given)?;
        if t.iter().zip(&g).any(|(a, b)| a & b != 0) {
            return Err(Error::InvalidParameter("target and conditioning layers overlap".into()));
        }
        let both: Vec<u64> = t.iter().zip(&g).map(|(a, b)| a | b).collect();
        let (h1, s1) = self.entropy_with_error(q.receiver, &g);
        let (h2, s2) = self.entropy_with_error(q.receiver, &both);
        Ok((h1 - h2, s1.hypot(s2)))
    }

    pub fn query(&self, q: &MiQuery) -> Result<f64> {
        Ok(self.query_with_error(q)?.0)
    }
}

/// One-shot I(A; Y_k | B).
pub fn mutual_info(channel: &JointChannel, split: &LayerSplit, query: &MiQuery) -> Result<f64> {
    let cache = MiCache::new(channel.clone());
    Mi::new(&cache, split)?.query(query)
}

/// |sum of chain terms I(Z_l; Y_k | Z_1..Z_{l-1}) - I(X; Y_k)| for an order over all
/// layers of one input; the other inputs are noise.
pub fn chain_rule_check(mi: &Mi<'_>, order: &[LayerRef], receiver: usize) -> Result<f64> {
    let input = order
        .first()
        .map(|r| r.input)
        .ok_or_else(|| Error::InvalidParameter("empty layer order".into()))?;
    let split = mi.split().input(input);
    let mut seen = 0u64;
    let mut sum = 0.0;
    let n = mi.split().num_inputs();
    for r in order {
        if r.input != input || r.layer >= split.num_layers() || seen >> r.layer & 1 == 1 {
            return Err(Error::InvalidLayer { input: r.input, layer: r.layer });
        }
        let mut t = vec![0; n];
        let mut g = vec![0; n];
        t[input] = 1 << r.layer;
        g[input] = seen;
        sum += mi.cond_mi(receiver, &t, &g);
        seen |= 1 << r.layer;
    }
    if seen != split.full_mask() {
        return Err(Error::InvalidParameter("order does not cover every layer".into()));
    }
    let mut t = vec![0; n];
    t[input] = seen;
    Ok((sum - mi.cond_mi(receiver, &t, &vec![0; n])).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{DiscreteIc, Pmf};

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    /// Y1 = X xor noise(eps), Y2 = W; W is irrelevant at receiver 1.
    fn bsc_ic(eps: f64) -> DiscreteIc {
        let mut law1 = Vec::new();
        let mut law2 = Vec::new();
        for x in 0..2 {
            for w in 0..2 {
                law1.extend(if x == 0 { [1.0 - eps, eps] } else { [eps, 1.0 - eps] });
                law2.extend(if w == 0 { [1.0, 0.0] } else { [0.0, 1.0] });
            }
        }
        DiscreteIc::from_marginals(&law1, &law2, 2, 2, Pmf::uniform(2), Pmf::uniform(2)).unwrap()
    }

    fn q(target: &[(usize, usize)], given: &[(usize, usize)], rx: usize) -> MiQuery {
        MiQuery {
            target: target.iter().map(|&(i, l)| LayerRef::new(i, l)).collect(),
            given: given.iter().map(|&(i, l)| LayerRef::new(i, l)).collect(),
            receiver: rx,
        }
    }

    #[test]
    fn noiseless_bit() {
        let ic = bsc_ic(0.0);
        let split = LayerSplit::trivial(&[Pmf::uniform(2), Pmf::uniform(2)]);
        let v = mutual_info(&ic.to_joint(), &split, &q(&[(0, 0)], &[], 0)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bsc_closed_form() {
        let ic = bsc_ic(0.11);
        let split = LayerSplit::trivial(&[Pmf::uniform(2), Pmf::uniform(2)]);
        let v = mutual_info(&ic.to_joint(), &split, &q(&[(0, 0)], &[], 0)).unwrap();
        assert!((v - (1.0 - h2(0.11))).abs() < 1e-12);
        assert!((v - 0.5).abs() < 1e-3);
    }

    #[test]
    fn overlap_and_bad_index_rejected() {
        let ic = bsc_ic(0.1);
        let split = LayerSplit::trivial(&[Pmf::uniform(2), Pmf::uniform(2)]);
        let cache = MiCache::new(ic.to_joint());
        let mi = Mi::new(&cache, &split).unwrap();
        assert!(mi.query(&q(&[(0, 0)], &[(0, 0)], 0)).is_err());
        assert!(matches!(mi.query(&q(&[(0, 3)], &[], 0)), Err(Error::InvalidLayer { .. })));
        assert!(mi.query(&q(&[(0, 0)], &[], 5)).is_err());
    }

    #[test]
    fn mismatched_split_target_rejected() {
        let ic = bsc_ic(0.1);
        let split = LayerSplit::trivial(&[Pmf::new(vec![0.3, 0.7]).unwrap(), Pmf::uniform(2)]);
        let cache = MiCache::new(ic.to_joint());
        assert!(Mi::new(&cache, &split).is_err());
    }
}
