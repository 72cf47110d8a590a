//! Two-user interference channel models.
//!
//! A [`DiscreteIc`] holds a finite-alphabet law p(y1,y2|x,w). A [`GaussianIc`] holds
//! real gains; combined with one [`SymbolMap`] per sender it becomes a Gaussian channel
//! with finite constellations. Both lower to a [`JointChannel`], the representation the
//! mutual-information engine works on: a set of independent discrete inputs and one
//! output law per receiver.
//!
//! Noise convention: real channels have unit noise variance; complex channels use
//! variance 1/2 per real dimension so that total noise power is 1 in both cases.

mod constellations;
mod quadrature;

pub use constellations::{
    make_4pam_gray, make_4pam_natural, make_higher_maps, make_mimo_antenna, make_single,
    map_by_name, Constellation, HigherMap, SymbolMap,
};
pub use quadrature::{discretize_gaussian, discretize_gaussian_mc, EntropyMethod, HermiteRule, DEFAULT_NODES};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability mass function over `0..len`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf(Vec<f64>);

impl Pmf {
    /// Validates entries (finite, nonnegative) and normalization within 1e-12.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidPmf(format!("negative or non-finite entry in {p:?}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPmf(format!("entries sum to {total}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Point mass at `at`.
    pub fn point(n: usize, at: usize) -> Self {
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        Self(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.0)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.0
    }
}

/// Entropy in bits with the 0 log 0 = 0 convention.
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

/// Finite-alphabet interference channel p(y1,y2|x,w) with input pmfs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteIc {
    nx: usize,
    nw: usize,
    ny1: usize,
    ny2: usize,
    /// Flat row-major tensor indexed by (x, w, y1, y2).
    law: Vec<f64>,
    px: Pmf,
    pw: Pmf,
}

impl DiscreteIc {
    /// `law` is indexed row-major by (x, w, y1, y2); every (x, w) slice must sum to 1.
    pub fn new(
        sizes: [usize; 4],
        law: Vec<f64>,
        px: Pmf,
        pw: Pmf,
    ) -> Result<Self> {
        let [nx, nw, ny1, ny2] = sizes;
        if sizes.contains(&0) {
            return Err(Error::InvalidChannel("alphabet sizes must be positive".into()));
        }
        if law.len() != nx * nw * ny1 * ny2 {
            return Err(Error::InvalidChannel(format!(
                "law has {} entries, expected {}",
                law.len(),
                nx * nw * ny1 * ny2
            )));
        }
        if px.len() != nx || pw.len() != nw {
            return Err(Error::InvalidChannel("input pmf sizes do not match the law".into()));
        }
        let slice = ny1 * ny2;
        for (k, row) in law.chunks(slice).enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidChannel(format!("negative entry in slice {k}")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidChannel(format!(
                    "slice (x={}, w={}) sums to {total}",
                    k / nw,
                    k % nw
                )));
            }
        }
        Ok(Self { nx, nw, ny1, ny2, law, px, pw })
    }

    /// Builds the product law p(y1|x,w) p(y2|x,w) from two per-receiver laws indexed
    /// (x, w, y). Only the marginals enter any rate expression.
    pub fn from_marginals(
        law1: &[f64],
        law2: &[f64],
        ny1: usize,
        ny2: usize,
        px: Pmf,
        pw: Pmf,
    ) -> Result<Self> {
        let (nx, nw) = (px.len(), pw.len());
        if law1.len() != nx * nw * ny1 || law2.len() != nx * nw * ny2 {
            return Err(Error::InvalidChannel("marginal law sizes do not match".into()));
        }
        let mut law = Vec::with_capacity(nx * nw * ny1 * ny2);
        for xw in 0..nx * nw {
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    law.push(law1[xw * ny1 + y1] * law2[xw * ny2 + y2]);
                }
            }
        }
        // Products of normalized rows can drift by an ulp; renormalize each slice.
        for row in law.chunks_mut(ny1 * ny2) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        Self::new([nx, nw, ny1, ny2], law, px, pw)
    }

    pub fn sizes(&self) -> [usize; 4] {
        [self.nx, self.nw, self.ny1, self.ny2]
    }

    pub fn px(&self) -> &Pmf {
        &self.px
    }

    pub fn pw(&self) -> &Pmf {
        &self.pw
    }

    pub fn law(&self) -> &[f64] {
        &self.law
    }

    /// p(y1,y2|x,w).
    pub fn prob(&self, x: usize, w: usize, y1: usize, y2: usize) -> f64 {
        self.law[((x * self.nw + w) * self.ny1 + y1) * self.ny2 + y2]
    }

    /// Receiver-1 marginal p(y1|x,w), indexed (x, w, y1).
    pub fn law_y1(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nx * self.nw * self.ny1];
        for xw in 0..self.nx * self.nw {
            for y1 in 0..self.ny1 {
                let base = (xw * self.ny1 + y1) * self.ny2;
                out[xw * self.ny1 + y1] = self.law[base..base + self.ny2].iter().sum();
            }
        }
        out
    }

    /// Receiver-2 marginal p(y2|x,w), indexed (x, w, y2).
    pub fn law_y2(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nx * self.nw * self.ny2];
        for xw in 0..self.nx * self.nw {
            for y1 in 0..self.ny1 {
                let base = (xw * self.ny1 + y1) * self.ny2;
                for y2 in 0..self.ny2 {
                    out[xw * self.ny2 + y2] += self.law[base + y2];
                }
            }
        }
        out
    }

    /// Same law with different input pmfs.
    pub fn with_inputs(&self, px: Pmf, pw: Pmf) -> Result<Self> {
        Self::new(self.sizes(), self.law.clone(), px, pw)
    }

    /// Lowers to the two-input, two-receiver joint form.
    /// The JSON description that loads back to this channel.
    pub fn to_spec(&self) -> ChannelSpec {
        let law = (0..self.nx)
            .map(|x| {
                (0..self.nw)
                    .map(|w| {
                        (0..self.ny1)
                            .map(|y1| (0..self.ny2).map(|y2| self.prob(x, w, y1, y2)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ChannelSpec::Discrete { law, px: self.px.probs().to_vec(), pw: self.pw.probs().to_vec() }
    }

    pub fn to_joint(&self) -> JointChannel {
        JointChannel {
            inputs: vec![self.px.clone(), self.pw.clone()],
            receivers: vec![
                Receiver::Discrete(DiscreteReceiver { outputs: self.ny1, law: self.law_y1() }),
                Receiver::Discrete(DiscreteReceiver { outputs: self.ny2, law: self.law_y2() }),
            ],
        }
    }
}

/// Real-gain Gaussian interference channel Y1 = g11 X + g12 W + Z1, Y2 = g21 X + g22 W + Z2
/// with per-sender power P and unit noise power.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianIc {
    pub g11: f64,
    pub g12: f64,
    pub g21: f64,
    pub g22: f64,
    pub power: f64,
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl GaussianIc {
    pub fn new(g11: f64, g12: f64, g21: f64, g22: f64, power: f64) -> Result<Self> {
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidChannel(format!("power must be positive, got {power}")));
        }
        if [g11, g12, g21, g22].iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidChannel("gains must be finite".into()));
        }
        Ok(Self { g11, g12, g21, g22, power })
    }

    /// Gains from received SNR/INR in dB, g = sqrt(10^(dB/10) / P). `-inf` dB gives a zero gain.
    pub fn from_db(snr1_db: f64, inr1_db: f64, snr2_db: f64, inr2_db: f64, power_db: f64) -> Result<Self> {
        let p = db_to_linear(power_db);
        let g = |db: f64| (db_to_linear(db) / p).sqrt();
        Self::new(g(snr1_db), g(inr1_db), g(inr2_db), g(snr2_db), p)
    }

    /// Symmetric channel S1 = S2, I1 = I2 with unit power.
    pub fn symmetric(snr_db: f64, inr_db: f64) -> Result<Self> {
        Self::from_db(snr_db, inr_db, snr_db, inr_db, 0.0)
    }

    /// S1 = g11^2 P.
    pub fn s1(&self) -> f64 {
        self.g11 * self.g11 * self.power
    }

    pub fn s2(&self) -> f64 {
        self.g22 * self.g22 * self.power
    }

    /// I1 = g12^2 P, the interference power at receiver 1.
    pub fn i1(&self) -> f64 {
        self.g12 * self.g12 * self.power
    }

    pub fn i2(&self) -> f64 {
        self.g21 * self.g21 * self.power
    }

    /// Gains seen by receiver `k` (0-based) as (own-or-X gain, W gain).
    pub fn receiver_gains(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            (self.g11, self.g12)
        } else {
            (self.g21, self.g22)
        }
    }
}

/// Output law of one receiver in a [`JointChannel`].
#[derive(Clone, Debug)]
pub enum Receiver {
    Discrete(DiscreteReceiver),
    Gaussian(GaussianReceiver),
}

/// p(y|inputs) for a finite output alphabet, indexed (input tuple, y).
#[derive(Clone, Debug)]
pub struct DiscreteReceiver {
    pub outputs: usize,
    pub law: Vec<f64>,
}

/// Gaussian output with a finite set of noiseless means, one per input tuple.
#[derive(Clone, Debug)]
pub struct GaussianReceiver {
    /// Real dimensions of the output.
    pub dims: usize,
    /// Means indexed (input tuple, dimension).
    pub means: Vec<f64>,
    /// Noise variance per real dimension.
    pub sigma2: f64,
    pub method: EntropyMethod,
    /// Precomputed quadrature kernel, built on first use from `means`.
    pub(crate) kernel: quadrature::KernelCell,
}

/// Independent discrete inputs observed by one or more receivers.
///
/// Input tuples are indexed row-major with input 0 most significant.
#[derive(Clone, Debug)]
pub struct JointChannel {
    inputs: Vec<Pmf>,
    receivers: Vec<Receiver>,
}

impl JointChannel {
    pub fn new(inputs: Vec<Pmf>, receivers: Vec<Receiver>) -> Result<Self> {
        if inputs.is_empty() || receivers.is_empty() {
            return Err(Error::InvalidChannel("need at least one input and one receiver".into()));
        }
        let tuples: usize = inputs.iter().map(Pmf::len).product();
        for (k, rx) in receivers.iter().enumerate() {
            let ok = match rx {
                Receiver::Discrete(d) => {
                    d.law.len() == tuples * d.outputs
                        && d.law.chunks(d.outputs).all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= 1e-12)
                }
                Receiver::Gaussian(g) => g.means.len() == tuples * g.dims && g.sigma2 > 0.0,
            };
            if !ok {
                return Err(Error::InvalidChannel(format!("receiver {k} law is inconsistent")));
            }
        }
        Ok(Self { inputs, receivers })
    }

    /// A single-receiver discrete channel p(y|a,b,...) such as a multiple-access channel.
    pub fn discrete_mac(inputs: Vec<Pmf>, outputs: usize, law: Vec<f64>) -> Result<Self> {
        Self::new(inputs, vec![Receiver::Discrete(DiscreteReceiver { outputs, law })])
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_receivers(&self) -> usize {
        self.receivers.len()
    }

    pub fn input_pmf(&self, i: usize) -> &Pmf {
        &self.inputs[i]
    }

    pub fn input_sizes(&self) -> Vec<usize> {
        self.inputs.iter().map(Pmf::len).collect()
    }

    pub fn receiver(&self, k: usize) -> &Receiver {
        &self.receivers[k]
    }

    pub fn is_discrete(&self) -> bool {
        self.receivers.iter().all(|r| matches!(r, Receiver::Discrete(_)))
    }

    /// Replaces every input by a group of sub-inputs pushed through a table
    /// (e.g. X = x(S, T) for Han-Kobayashi). `groups[i] = (sub-input pmfs, table)` with the
    /// table indexed row-major over the sub-inputs.
    pub fn expand_inputs(&self, groups: &[(Vec<Pmf>, Vec<usize>)]) -> Result<Self> {
        if groups.len() != self.inputs.len() {
            return Err(Error::InvalidChannel("one expansion group per input is required".into()));
        }
        let old_sizes = self.input_sizes();
        let mut new_inputs = Vec::new();
        for (i, (pmfs, table)) in groups.iter().enumerate() {
            let n: usize = pmfs.iter().map(Pmf::len).product();
            if table.len() != n || table.iter().any(|&v| v >= old_sizes[i]) {
                return Err(Error::InvalidChannel(format!("expansion table {i} is inconsistent")));
            }
            new_inputs.extend(pmfs.iter().cloned());
        }
        let new_sizes: Vec<usize> = new_inputs.iter().map(Pmf::len).collect();
        let new_tuples: usize = new_sizes.iter().product();
        // Map every new tuple to the old tuple it drives.
        let mut old_of_new = Vec::with_capacity(new_tuples);
        let mut digits = vec![0usize; new_sizes.len()];
        for t in 0..new_tuples {
            decode_tuple(t, &new_sizes, &mut digits);
            let mut pos = 0;
            let mut old = 0;
            for (i, (pmfs, table)) in groups.iter().enumerate() {
                let sizes: Vec<usize> = pmfs.iter().map(Pmf::len).collect();
                let sub = encode_tuple(&digits[pos..pos + sizes.len()], &sizes);
                pos += sizes.len();
                old = old * old_sizes[i] + table[sub];
            }
            old_of_new.push(old);
        }
        let receivers = self
            .receivers
            .iter()
            .map(|rx| match rx {
                Receiver::Discrete(d) => {
                    let mut law = Vec::with_capacity(new_tuples * d.outputs);
                    for &o in &old_of_new {
                        law.extend_from_slice(&d.law[o * d.outputs..(o + 1) * d.outputs]);
                    }
                    Receiver::Discrete(DiscreteReceiver { outputs: d.outputs, law })
                }
                Receiver::Gaussian(g) => {
                    let mut means = Vec::with_capacity(new_tuples * g.dims);
                    for &o in &old_of_new {
                        means.extend_from_slice(&g.means[o * g.dims..(o + 1) * g.dims]);
                    }
                    Receiver::Gaussian(GaussianReceiver::new(g.dims, means, g.sigma2, g.method.clone()))
                }
            })
            .collect();
        Self::new(new_inputs, receivers)
    }

    /// Output entropy (bits; differential for Gaussian receivers) of receiver `k` when the
    /// input tuple is distributed as `weights`.
    pub fn output_entropy(&self, k: usize, weights: &[f64]) -> f64 {
        match &self.receivers[k] {
            Receiver::Discrete(d) => {
                let mut py = vec![0.0; d.outputs];
                for (t, &q) in weights.iter().enumerate() {
                    if q > 0.0 {
                        let row = &d.law[t * d.outputs..(t + 1) * d.outputs];
                        py.iter_mut().zip(row).for_each(|(a, b)| *a += q * b);
                    }
                }
                entropy_bits(&py)
            }
            Receiver::Gaussian(g) => g.mixture_entropy(weights),
        }
    }
}

/// Row-major tuple index of `digits` with per-position `sizes`.
pub fn encode_tuple(digits: &[usize], sizes: &[usize]) -> usize {
    digits.iter().zip(sizes).fold(0, |acc, (&d, &s)| acc * s + d)
}

/// Inverse of [`encode_tuple`].
pub fn decode_tuple(mut index: usize, sizes: &[usize], digits: &mut [usize]) {
    for i in (0..sizes.len()).rev() {
        digits[i] = index % sizes[i];
        index /= sizes[i];
    }
}

/// Symbol points of a map as (tuple -> complex vector); used by the Gaussian lowering.
pub(crate) fn real_coords(points: &[Vec<Complex64>], complex: bool) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            p.iter()
                .flat_map(|c| if complex { vec![c.re, c.im] } else { vec![c.re] })
                .collect()
        })
        .collect()
}

/// JSON channel description.
///
/// ```json
/// {"type": "discrete", "law": [[[[...y2...]...y1]...w]...x], "px": [...], "pw": [...]}
/// {"type": "gaussian", "snr_db": 8, "inr_db": 8, "x_map": "4pam_natural", "w_map": "bpsk"}
/// {"type": "gaussian", "gains": {"g11": 1, "g12": 0.5, "g21": 0.5, "g22": 1}, "power_db": 0}
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChannelSpec {
    Discrete {
        law: Vec<Vec<Vec<Vec<f64>>>>,
        px: Vec<f64>,
        pw: Vec<f64>,
    },
    Gaussian {
        #[serde(default)]
        gains: Option<Gains>,
        #[serde(default)]
        snr_db: Option<f64>,
        #[serde(default)]
        inr_db: Option<f64>,
        #[serde(default)]
        snr2_db: Option<f64>,
        #[serde(default)]
        inr2_db: Option<f64>,
        #[serde(default)]
        power_db: Option<f64>,
        #[serde(default = "default_x_map")]
        x_map: String,
        #[serde(default = "default_w_map")]
        w_map: String,
        #[serde(default = "default_nodes")]
        nodes: usize,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Gains {
    pub g11: f64,
    pub g12: f64,
    pub g21: f64,
    pub g22: f64,
}

fn default_x_map() -> String {
    "4pam_natural".into()
}

fn default_w_map() -> String {
    "bpsk".into()
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

/// A loaded channel: the joint form plus whatever structure produced it.
#[derive(Clone, Debug)]
pub enum Channel {
    Discrete(DiscreteIc),
    Gaussian {
        ic: GaussianIc,
        x_map: SymbolMap,
        w_map: SymbolMap,
        nodes: usize,
    },
}

impl Channel {
    pub fn from_spec(spec: &ChannelSpec) -> Result<Self> {
        match spec {
            ChannelSpec::Discrete { law, px, pw } => {
                let nx = law.len();
                let nw = law.first().map_or(0, Vec::len);
                let ny1 = law.first().and_then(|a| a.first()).map_or(0, Vec::len);
                let ny2 = law
                    .first()
                    .and_then(|a| a.first())
                    .and_then(|b| b.first())
                    .map_or(0, Vec::len);
                let mut flat = Vec::with_capacity(nx * nw * ny1 * ny2);
                for a in law {
                    if a.len() != nw {
                        return Err(Error::InvalidChannel("ragged law tensor".into()));
                    }
                    for b in a {
                        if b.len() != ny1 {
                            return Err(Error::InvalidChannel("ragged law tensor".into()));
                        }
                        for c in b {
                            if c.len() != ny2 {
                                return Err(Error::InvalidChannel("ragged law tensor".into()));
                            }
                            flat.extend_from_slice(c);
                        }
                    }
                }
                let ic = DiscreteIc::new(
                    [nx, nw, ny1, ny2],
                    flat,
                    Pmf::new(px.clone())?,
                    Pmf::new(pw.clone())?,
                )?;
                Ok(Channel::Discrete(ic))
            }
            ChannelSpec::Gaussian {
                gains,
                snr_db,
                inr_db,
                snr2_db,
                inr2_db,
                power_db,
                x_map,
                w_map,
                nodes,
            } => {
                let pdb = power_db.unwrap_or(0.0);
                let ic = match (gains, snr_db, inr_db) {
                    (Some(g), _, _) => GaussianIc::new(g.g11, g.g12, g.g21, g.g22, db_to_linear(pdb))?,
                    (None, Some(s), Some(i)) => GaussianIc::from_db(
                        *s,
                        *i,
                        snr2_db.unwrap_or(*s),
                        inr2_db.unwrap_or(*i),
                        pdb,
                    )?,
                    _ => {
                        return Err(Error::InvalidChannel(
                            "gaussian channel needs `gains` or both `snr_db` and `inr_db`".into(),
                        ))
                    }
                };
                Ok(Channel::Gaussian {
                    ic,
                    x_map: map_by_name(x_map)?,
                    w_map: map_by_name(w_map)?,
                    nodes: *nodes,
                })
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ChannelSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Joint form with the senders' full symbols as the two inputs.
    pub fn to_joint(&self) -> Result<JointChannel> {
        match self {
            Channel::Discrete(ic) => Ok(ic.to_joint()),
            Channel::Gaussian { ic, x_map, w_map, nodes } => discretize_gaussian(ic, x_map, w_map, *nodes),
        }
    }

    /// Symbol maps of the two senders when the channel is Gaussian.
    pub fn maps(&self) -> Option<(&SymbolMap, &SymbolMap)> {
        match self {
            Channel::Gaussian { x_map, w_map, .. } => Some((x_map, w_map)),
            Channel::Discrete(_) => None,
        }
    }
}
