//! Gauss-Hermite quadrature for entropies of Gaussian mixtures.
//!
//! A receiver that sees a finite constellation through AWGN has a Gaussian-mixture
//! output. Its differential entropy is E[-log f(Y)], which we evaluate per component
//! with the change of variables y = mu + sqrt(2 sigma^2) x against the weight e^{-x^2}.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{GaussianIc, GaussianReceiver, JointChannel, Pmf, Receiver, SymbolMap};
use crate::error::{Error, Result};

/// Default node count per real dimension.
pub const DEFAULT_NODES: usize = 96;

/// Tensor-grid points whose weight falls below this fraction of the total are dropped.
const WEIGHT_FLOOR: f64 = 1e-18;

/// Kernels larger than this many entries are not cached.
const KERNEL_LIMIT: usize = 1 << 23;

/// Lazily built kernel shared by clones of a receiver.
pub(crate) type KernelCell = Arc<OnceLock<Option<Kernel>>>;

/// For distinct means mu_c and quadrature points z_n, the unnormalized densities
/// k[(c * nodes + n) * comps + c'] = exp(-|mu_c + sd z_n - mu_c'|^2 / (2 sigma^2)), so a
/// mixture entropy becomes weighted sums and one log per (component, node).
#[derive(Debug)]
pub(crate) struct Kernel {
    /// Component of each input tuple.
    comp_of: Vec<usize>,
    comps: usize,
    weights: Vec<f64>,
    k: Vec<f64>,
}

/// Nodes and weights for the integral of f(x) e^{-x^2} over the real line.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HermiteRule {
    /// Newton iteration on the orthonormal Hermite recurrence, which stays finite for
    /// large `n` where the monic polynomials overflow.
    pub fn new(n: usize) -> Self {
        const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        Self { nodes: x, weights: w }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Standard-normal expectation points: (z, weight) with weights summing to 1 and
    /// z = sqrt(2) x, over `dims` dimensions as a tensor grid.
    pub(crate) fn normal_grid(&self, dims: usize) -> Vec<(Vec<f64>, f64)> {
        let inv = std::f64::consts::PI.sqrt().recip();
        let one: Vec<(f64, f64)> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (std::f64::consts::SQRT_2 * x, w * inv))
            .collect();
        let mut grid = vec![(Vec::new(), 1.0)];
        for _ in 0..dims {
            let mut next = Vec::with_capacity(grid.len() * one.len());
            for (pt, w) in &grid {
                for &(z, v) in &one {
                    let wv = w * v;
                    if wv >= WEIGHT_FLOOR {
                        let mut p = pt.clone();
                        p.push(z);
                        next.push((p, wv));
                    }
                }
            }
            grid = next;
        }
        grid
    }
}

/// How a Gaussian receiver evaluates mixture entropies.
#[derive(Clone, Debug, PartialEq)]
pub enum EntropyMethod {
    /// Tensor Gauss-Hermite grid (1 or 2 real dimensions).
    Quadrature(Arc<HermiteRule>),
    /// Seeded Monte Carlo with a standard-error estimate, for any dimension.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Lowers a Gaussian IC with one symbol map per sender to a two-input joint channel whose
/// inputs are the senders' full symbols, distributed as the pushforward of uniform layers.
pub fn discretize_gaussian(ic: &GaussianIc, x_map: &SymbolMap, w_map: &SymbolMap, quad_nodes: usize) -> Result<JointChannel> {
    if quad_nodes < 16 {
        return Err(Error::InvalidParameter(format!("need at least 16 quadrature nodes, got {quad_nodes}")));
    }
    let dims = receiver_dims(x_map, w_map)?;
    if dims > 2 {
        return Err(Error::UnsupportedDimension(dims));
    }
    build(ic, x_map, w_map, EntropyMethod::Quadrature(Arc::new(HermiteRule::new(quad_nodes))))
}

/// Like [`discretize_gaussian`] but with Monte Carlo entropies, which also covers outputs
/// with more than two real dimensions.
pub fn discretize_gaussian_mc(ic: &GaussianIc, x_map: &SymbolMap, w_map: &SymbolMap, samples: usize, seed: u64) -> Result<JointChannel> {
    build(ic, x_map, w_map, EntropyMethod::MonteCarlo { samples, seed })
}

fn receiver_dims(x_map: &SymbolMap, w_map: &SymbolMap) -> Result<usize> {
    if x_map.output_points().is_empty() || w_map.output_points().is_empty() {
        return Err(Error::InvalidParameter("gaussian channels need constellation maps".into()));
    }
    if x_map.antennas() != w_map.antennas() {
        return Err(Error::InvalidParameter("senders use different antenna counts".into()));
    }
    let complex = !(x_map.is_real() && w_map.is_real());
    Ok(x_map.antennas() * if complex { 2 } else { 1 })
}

fn build(ic: &GaussianIc, x_map: &SymbolMap, w_map: &SymbolMap, method: EntropyMethod) -> Result<JointChannel> {
    let dims = receiver_dims(x_map, w_map)?;
    let complex = !(x_map.is_real() && w_map.is_real());
    let sigma2 = if complex { 0.5 } else { 1.0 };
    let xs = super::real_coords(x_map.output_points(), complex);
    let ws = super::real_coords(w_map.output_points(), complex);
    let amp = ic.power.sqrt();
    let mut receivers = Vec::with_capacity(2);
    for k in 0..2 {
        let (gx, gw) = ic.receiver_gains(k);
        let mut means = Vec::with_capacity(xs.len() * ws.len() * dims);
        for x in &xs {
            for w in &ws {
                means.extend(x.iter().zip(w).map(|(a, b)| amp * (gx * a + gw * b)));
            }
        }
        receivers.push(Receiver::Gaussian(GaussianReceiver::new(dims, means, sigma2, method.clone())));
    }
    let uniform = |m: &SymbolMap| {
        let layers: Vec<Pmf> = m.layer_sizes().iter().map(|&s| Pmf::uniform(s)).collect();
        m.pushforward(&layers).and_then(Pmf::new)
    };
    JointChannel::new(vec![uniform(x_map)?, uniform(w_map)?], receivers)
}

impl GaussianReceiver {
    pub fn new(dims: usize, means: Vec<f64>, sigma2: f64, method: EntropyMethod) -> Self {
        Self { dims, means, sigma2, method, kernel: KernelCell::default() }
    }

    fn kernel(&self) -> Option<&Kernel> {
        let EntropyMethod::Quadrature(rule) = &self.method else { return None };
        self.kernel
            .get_or_init(|| {
                let d = self.dims;
                let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
                let mut mus: Vec<f64> = Vec::new();
                let comp_of = self
                    .means
                    .chunks(d)
                    .map(|mu| {
                        let key: Vec<i64> = mu.iter().map(|v| (v * 1e12).round() as i64).collect();
                        *index.entry(key).or_insert_with(|| {
                            mus.extend_from_slice(mu);
                            mus.len() / d - 1
                        })
                    })
                    .collect();
                let comps = mus.len() / d;
                let grid = rule.normal_grid(d);
                if comps * comps * grid.len() > KERNEL_LIMIT {
                    return None;
                }
                let sd = self.sigma2.sqrt();
                let inv = 0.5 / self.sigma2;
                let mut k = Vec::with_capacity(comps * comps * grid.len());
                for c in 0..comps {
                    for (z, _) in &grid {
                        for c2 in 0..comps {
                            let dist: f64 = (0..d)
                                .map(|i| (mus[c * d + i] + sd * z[i] - mus[c2 * d + i]).powi(2))
                                .sum();
                            k.push((-inv * dist).exp());
                        }
                    }
                }
                Some(Kernel { comp_of, comps, weights: grid.iter().map(|g| g.1).collect(), k })
            })
            .as_ref()
    }

    /// Quadrature entropy through the cached kernel (nats, without the noise constant).
    fn kernel_entropy(&self, kern: &Kernel, weights: &[f64]) -> f64 {
        let mut pis = vec![0.0; kern.comps];
        for (t, &q) in weights.iter().enumerate() {
            pis[kern.comp_of[t]] += q;
        }
        let total: f64 = pis.iter().sum();
        pis.iter_mut().for_each(|p| *p /= total);
        let nodes = kern.weights.len();
        let mut h = 0.0;
        for (c, &pi) in pis.iter().enumerate() {
            if pi <= 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for (n, &w) in kern.weights.iter().enumerate() {
                let row = &kern.k[(c * nodes + n) * kern.comps..(c * nodes + n + 1) * kern.comps];
                let dens: f64 = row.iter().zip(&pis).map(|(a, b)| a * b).sum();
                acc += w * dens.ln();
            }
            h -= pi * acc;
        }
        h
    }

    /// Merges tuples with identical means (to 1e-12) into weighted mixture components.
    fn components(&self, weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = self.dims;
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut pis = Vec::new();
        let mut mus = Vec::new();
        for (t, &q) in weights.iter().enumerate() {
            if q <= 0.0 {
                continue;
            }
            let mu = &self.means[t * d..(t + 1) * d];
            let key: Vec<i64> = mu.iter().map(|v| (v * 1e12).round() as i64).collect();
            match index.get(&key) {
                Some(&c) => pis[c] += q,
                None => {
                    index.insert(key, pis.len());
                    pis.push(q);
                    mus.extend_from_slice(mu);
                }
            }
        }
        (pis, mus)
    }

    /// Natural log of the mixture density at `y`.
    fn ln_density(&self, y: &[f64], pis: &[f64], mus: &[f64]) -> f64 {
        let d = self.dims;
        let inv = 0.5 / self.sigma2;
        let mut best = f64::NEG_INFINITY;
        let mut exps = Vec::with_capacity(pis.len());
        for (c, &pi) in pis.iter().enumerate() {
            let dist: f64 = y.iter().zip(&mus[c * d..(c + 1) * d]).map(|(a, b)| (a - b) * (a - b)).sum();
            let e = pi.ln() - inv * dist;
            best = best.max(e);
            exps.push(e);
        }
        let sum: f64 = exps.iter().map(|e| (e - best).exp()).sum();
        best + sum.ln() - 0.5 * d as f64 * (2.0 * std::f64::consts::PI * self.sigma2).ln()
    }

    /// Differential entropy (bits) of the output when the input tuple has law `weights`.
    pub fn mixture_entropy(&self, weights: &[f64]) -> f64 {
        self.mixture_entropy_with_error(weights).0
    }

    /// Entropy and its standard error (zero for quadrature).
    pub fn mixture_entropy_with_error(&self, weights: &[f64]) -> (f64, f64) {
        let (pis, mus) = self.components(weights);
        let d = self.dims;
        let sd = self.sigma2.sqrt();
        match &self.method {
            EntropyMethod::Quadrature(rule) => {
                let total: f64 = pis.iter().sum();
                let pis: Vec<f64> = pis.iter().map(|p| p / total).collect();
                if pis.len() == 1 {
                    let h = 0.5 * d as f64 * (2.0 * std::f64::consts::PI * std::f64::consts::E * self.sigma2).log2();
                    return (h, 0.0);
                }
                if let Some(kern) = self.kernel() {
                    let h = self.kernel_entropy(kern, weights)
                        + 0.5 * d as f64 * (2.0 * std::f64::consts::PI * self.sigma2).ln();
                    return (h / std::f64::consts::LN_2, 0.0);
                }
                let grid = rule.normal_grid(d);
                let mut y = vec![0.0; d];
                let mut h = 0.0;
                for (c, &pi) in pis.iter().enumerate() {
                    let mu = &mus[c * d..(c + 1) * d];
                    let mut acc = 0.0;
                    for (z, w) in &grid {
                        for k in 0..d {
                            y[k] = mu[k] + sd * z[k];
                        }
                        acc += w * self.ln_density(&y, &pis, &mus);
                    }
                    h -= pi * acc;
                }
                (h / std::f64::consts::LN_2, 0.0)
            }
            EntropyMethod::MonteCarlo { samples, seed } => {
                let total: f64 = pis.iter().sum();
                let pis: Vec<f64> = pis.iter().map(|p| p / total).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut y = vec![0.0; d];
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..*samples {
                    let u: f64 = rng.random();
                    let mut c = 0;
                    let mut cum = pis[0];
                    while u >= cum && c + 1 < pis.len() {
                        c += 1;
                        cum += pis[c];
                    }
                    for k in 0..d {
                        let z: f64 = rng.sample(StandardNormal);
                        y[k] = mus[c * d + k] + sd * z;
                    }
                    let v = -self.ln_density(&y, &pis, &mus) / std::f64::consts::LN_2;
                    s1 += v;
                    s2 += v * v;
                }
                let n = *samples as f64;
                let mean = s1 / n;
                let var = (s2 / n - mean * mean).max(0.0);
                (mean, (var / n).sqrt())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_single, Constellation};

    #[test]
    fn rule_moments() {
        let r = HermiteRule::new(64);
        let sp = std::f64::consts::PI.sqrt();
        let m0: f64 = r.weights.iter().sum();
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        let m4: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m0 - sp).abs() < 1e-13);
        assert!((m2 - sp / 2.0).abs() < 1e-13);
        assert!((m4 - 0.75 * sp).abs() < 1e-12);
    }

    #[test]
    fn rule_small_n_matches_closed_form() {
        // n = 2: nodes +-1/sqrt(2), weights sqrt(pi)/2.
        let r = HermiteRule::new(2);
        assert!((r.nodes[0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((r.weights[0] - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_gain_has_identical_densities() {
        let ic = GaussianIc::new(0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let b = make_single(Constellation::bpsk());
        let ch = discretize_gaussian(&ic, &b, &b, 32).unwrap();
        let Receiver::Gaussian(g) = ch.receiver(0) else { panic!() };
        assert!(g.means.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn kernel_matches_direct_quadrature() {
        let ic = GaussianIc::symmetric(6.0, 9.0).unwrap();
        let x = crate::channels::make_4pam_natural();
        let w = make_single(Constellation::bpsk());
        let ch = discretize_gaussian(&ic, &x, &w, 64).unwrap();
        let Receiver::Gaussian(g) = ch.receiver(0) else { panic!() };
        let weights = [0.05, 0.15, 0.1, 0.2, 0.12, 0.08, 0.2, 0.1];
        let fast = g.mixture_entropy(&weights);
        let slow = GaussianReceiver::new(g.dims, g.means.clone(), g.sigma2, g.method.clone());
        // Bypass the kernel by evaluating the log-sum-exp path directly.
        let (pis, mus) = slow.components(&weights);
        let grid = HermiteRule::new(64).normal_grid(1);
        let mut h = 0.0;
        for (c, &pi) in pis.iter().enumerate() {
            let acc: f64 = grid
                .iter()
                .map(|(z, wt)| wt * slow.ln_density(&[mus[c] + z[0]], &pis, &mus))
                .sum();
            h -= pi * acc;
        }
        assert!((fast - h / std::f64::consts::LN_2).abs() < 1e-12, "{fast} vs {h}");
    }

    #[test]
    fn too_few_nodes_rejected() {
        let ic = GaussianIc::symmetric(0.0, 0.0).unwrap();
        let b = make_single(Constellation::bpsk());
        assert!(discretize_gaussian(&ic, &b, &b, 8).is_err());
    }

    #[test]
    fn four_dims_needs_monte_carlo() {
        let ic = GaussianIc::symmetric(0.0, 0.0).unwrap();
        let m = crate::channels::make_mimo_antenna(2, Constellation::qpsk()).unwrap();
        assert!(matches!(discretize_gaussian(&ic, &m, &m, 32), Err(Error::UnsupportedDimension(4))));
        let ch = discretize_gaussian_mc(&ic, &m, &m, 2000, 1).unwrap();
        let Receiver::Gaussian(g) = ch.receiver(0) else { panic!() };
        let w = vec![1.0 / 256.0; 256];
        let (h, se) = g.mixture_entropy_with_error(&w);
        assert!(h.is_finite() && se > 0.0);
    }
}
