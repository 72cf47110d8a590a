//! Per-bit LLRs of one binary layer, marginalizing the unknown layers.

use super::code::LLR_CLAMP;

/// A real scalar receiver observing binary layers: `means[tuple]` is the noiseless output
/// for a tuple of layer bits (row-major, layer 0 most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredReceiver {
    pub layers: usize,
    pub means: Vec<f64>,
    pub sigma2: f64,
}

impl LayeredReceiver {
    pub fn new(layers: usize, means: Vec<f64>, sigma2: f64) -> Self {
        assert_eq!(means.len(), 1 << layers, "one mean per layer tuple");
        Self { layers, means, sigma2 }
    }

    fn weight(&self, layer: usize) -> usize {
        1 << (self.layers - 1 - layer)
    }

    /// Noiseless output for known bits of every layer at symbol `t`.
    pub fn mean(&self, bits: &[&[u8]], t: usize) -> f64 {
        let idx = bits.iter().enumerate().map(|(i, b)| b[t] as usize * self.weight(i)).sum::<usize>();
        self.means[idx]
    }
}

/// log P(bit 0 | y) / P(bit 1 | y) for every symbol of `target`, with layers in `known`
/// substituted and the rest averaged over uniform bits. Values are clamped at the LLR
/// limit.
pub fn demap_llr(rx: &LayeredReceiver, y: &[f64], known: &[Option<&[u8]>], target: usize) -> Vec<f64> {
    assert_eq!(known.len(), rx.layers);
    let free: Vec<usize> =
        (0..rx.layers).filter(|&i| i != target && known[i].is_none()).map(|i| rx.weight(i)).collect();
    let tw = rx.weight(target);
    let offsets: Vec<usize> = (0..1usize << free.len())
        .map(|c| free.iter().enumerate().map(|(j, &w)| (c >> j & 1) * w).sum())
        .collect();
    let inv = 0.5 / rx.sigma2;
    let mut d = vec![0.0; offsets.len()];
    y.iter()
        .enumerate()
        .map(|(t, &yt)| {
            let base: usize = known
                .iter()
                .enumerate()
                .filter_map(|(i, k)| k.map(|b| b[t] as usize * rx.weight(i)))
                .sum();
            let mut lse = [0.0; 2];
            for (bit, acc) in lse.iter_mut().enumerate() {
                let start = base + bit * tw;
                for (dj, &o) in d.iter_mut().zip(&offsets) {
                    let e = yt - rx.means[start + o];
                    *dj = -e * e * inv;
                }
                let m = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                *acc = m + d.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            }
            (lse[0] - lse[1]).clamp(-LLR_CLAMP, LLR_CLAMP)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bpsk(g: f64, sigma2: f64) -> LayeredReceiver {
        LayeredReceiver::new(1, vec![g, -g], sigma2)
    }

    #[test]
    fn bpsk_llr_is_linear() {
        let l = demap_llr(&bpsk(0.7, 0.5), &[0.3, -1.0], &[None], 0);
        assert!((l[0] - 2.0 * 0.7 * 0.3 / 0.5).abs() < 1e-12);
        assert!((l[1] + 2.0 * 0.7 / 0.5).abs() < 1e-12);
    }

    #[test]
    fn saturates_and_vanishes() {
        assert_eq!(demap_llr(&bpsk(1.0, 1e-6), &[1.0], &[None], 0)[0], LLR_CLAMP);
        assert_eq!(demap_llr(&bpsk(0.0, 1.0), &[0.4], &[None], 0)[0], 0.0);
    }

    #[test]
    fn known_layer_is_substituted() {
        // Two layers y = a + 3b: knowing b collapses to BPSK on a.
        let s = |b: usize| if b == 0 { 1.0 } else { -1.0 };
        let means = (0..4).map(|i| s(i >> 1) + 3.0 * s(i & 1)).collect();
        let rx = LayeredReceiver::new(2, means, 1.0);
        let b = [1u8];
        let l = demap_llr(&rx, &[-2.5], &[None, Some(&b)], 0);
        assert!((l[0] - 2.0 * 0.5).abs() < 1e-12);
    }
}
