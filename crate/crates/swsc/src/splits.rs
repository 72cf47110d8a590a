//! Layer splits: independent layer variables plus a deterministic map to each sender's symbol.
//!
//! A [`SenderSplit`] realizes one input X as x(X1, ..., XK) with independent layers whose
//! pushforward equals the declared target p(x). A [`LayerSplit`] holds one sender split per
//! channel input. The constructors here build the erasure-based splits used throughout the
//! region algebra.

use serde::{Deserialize, Serialize};

use crate::channels::{decode_tuple, encode_tuple, Pmf, SymbolMap};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// One sender's layers and symbol map.
#[derive(Clone, Debug, PartialEq)]
pub struct SenderSplit {
    layers: Vec<Pmf>,
    table: Vec<usize>,
    target: Pmf,
}

/// A conditional law of the sender symbol: (probability of the conditioning event, p(x|event)).
pub type Decomposition = Vec<(f64, Vec<f64>)>;

impl SenderSplit {
    /// Validates the table against the layer alphabets and checks p' ~ p within 1e-9.
    pub fn new(layers: Vec<Pmf>, table: Vec<usize>, target: Pmf) -> Result<Self> {
        let domain: usize = layers.iter().map(Pmf::len).product();
        if layers.is_empty() || layers.len() > 63 {
            return Err(Error::InvalidParameter("a split needs between 1 and 63 layers".into()));
        }
        if table.len() != domain || table.iter().any(|&v| v >= target.len()) {
            return Err(Error::InvalidParameter(format!(
                "map table has {} entries for a domain of {domain} and {} outputs",
                table.len(),
                target.len()
            )));
        }
        let split = Self { layers, table, target };
        let dev = split.pushforward_deviation();
        if dev > Tolerances::DEFAULT.pushforward {
            return Err(Error::InvalidParameter(format!("pushforward misses the target by {dev:e}")));
        }
        Ok(split)
    }

    /// The unsplit input: one layer equal to X.
    pub fn trivial(p: Pmf) -> Self {
        let n = p.len();
        Self { layers: vec![p.clone()], table: (0..n).collect(), target: p }
    }

    /// Layers of a constellation map with the given layer pmfs; the target is their pushforward.
    pub fn from_symbol_map(map: &SymbolMap, layer_pmfs: Vec<Pmf>) -> Result<Self> {
        let target = Pmf::new(map.pushforward(&layer_pmfs)?)?;
        Self::new(layer_pmfs, map.table().to_vec(), target)
    }

    /// Uniform layers of a constellation map.
    pub fn uniform_symbol_map(map: &SymbolMap) -> Result<Self> {
        let pmfs = map.layer_sizes().iter().map(|&s| Pmf::uniform(s)).collect();
        Self::from_symbol_map(map, pmfs)
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Pmf] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Pmf::len).collect()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn target(&self) -> &Pmf {
        &self.target
    }

    /// Mask with every layer set.
    pub fn full_mask(&self) -> u64 {
        (1u64 << self.layers.len()) - 1
    }

    pub fn pushforward(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.target.len()];
        for (p, d) in self.decompose(0) {
            out.iter_mut().zip(d).for_each(|(a, b)| *a += p * b);
        }
        out
    }

    /// Max absolute deviation between the pushforward and the target.
    pub fn pushforward_deviation(&self) -> f64 {
        self.pushforward()
            .iter()
            .zip(self.target.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Law of X given the layers in `mask`: a list of (P(known values), p(x | known values)),
    /// with identical conditional laws merged. Zero-probability events are dropped.
    pub fn decompose(&self, mask: u64) -> Decomposition {
        let sizes = self.layer_sizes();
        let nx = self.target.len();
        let domain = self.table.len();
        let mut digits = vec![0; sizes.len()];
        let mut known = Vec::with_capacity(sizes.len());
        // Group tuples by the values of the known layers.
        let mut groups: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
        let mut index = std::collections::HashMap::new();
        for t in 0..domain {
            decode_tuple(t, &sizes, &mut digits);
            let prob: f64 = digits.iter().zip(&self.layers).map(|(&d, p)| p.probs()[d]).product();
            if prob == 0.0 {
                continue;
            }
            known.clear();
            known.extend((0..sizes.len()).filter(|i| mask >> i & 1 == 1).map(|i| digits[i]));
            let g = *index.entry(known.clone()).or_insert_with(|| {
                groups.push((known.clone(), vec![0.0; nx]));
                groups.len() - 1
            });
            groups[g].1[self.table[t]] += prob;
        }
        let mut out: Decomposition = Vec::new();
        for (_, mut law) in groups {
            let total: f64 = law.iter().sum();
            law.iter_mut().for_each(|v| *v /= total);
            match out.iter_mut().find(|(_, l)| *l == law) {
                Some(entry) => entry.0 += total,
                None => out.push((total, law)),
            }
        }
        out
    }

    /// Symbol for a full layer tuple.
    pub fn map(&self, digits: &[usize]) -> usize {
        self.table[encode_tuple(digits, &self.layer_sizes())]
    }
}

/// One sender split per channel input.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerSplit {
    inputs: Vec<SenderSplit>,
}

impl LayerSplit {
    pub fn new(inputs: Vec<SenderSplit>) -> Self {
        Self { inputs }
    }

    /// No splitting: every input is a single layer.
    pub fn trivial(pmfs: &[Pmf]) -> Self {
        Self::new(pmfs.iter().cloned().map(SenderSplit::trivial).collect())
    }

    pub fn inputs(&self) -> &[SenderSplit] {
        &self.inputs
    }

    pub fn input(&self, i: usize) -> &SenderSplit {
        &self.inputs[i]
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// Masks selecting every layer of every input.
    pub fn full_masks(&self) -> Vec<u64> {
        self.inputs.iter().map(SenderSplit::full_mask).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let docs: Vec<SplitDoc> = self.inputs.iter().map(SplitDoc::from).collect();
        Ok(serde_json::to_string_pretty(&docs)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let docs: Vec<SplitDoc> = serde_json::from_str(text)?;
        Ok(Self::new(docs.into_iter().map(SenderSplit::try_from).collect::<Result<_>>()?))
    }
}

/// JSON form of a sender split.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitDoc {
    pub layers: Vec<LayerDoc>,
    pub map: String,
    pub table: Vec<usize>,
    pub target: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayerDoc {
    pub pmf: Vec<f64>,
}

impl From<&SenderSplit> for SplitDoc {
    fn from(s: &SenderSplit) -> Self {
        Self {
            layers: s.layers.iter().map(|p| LayerDoc { pmf: p.probs().to_vec() }).collect(),
            map: "table".into(),
            table: s.table.clone(),
            target: s.target.probs().to_vec(),
        }
    }
}

impl TryFrom<SplitDoc> for SenderSplit {
    type Error = Error;
    fn try_from(d: SplitDoc) -> Result<Self> {
        if d.map != "table" {
            return Err(Error::Unknown { kind: "map kind", name: d.map });
        }
        let layers = d.layers.into_iter().map(|l| Pmf::new(l.pmf)).collect::<Result<_>>()?;
        SenderSplit::new(layers, d.table, Pmf::new(d.target)?)
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// X1 over X u {e} with P(X1 = e) = alpha, X2 ~ p(x), x = x1 unless x1 = e, then x2.
/// The erasure symbol has index |X|.
pub fn erasure_split(p: &Pmf, alpha: f64) -> Result<SenderSplit> {
    check_unit("alpha", alpha)?;
    let n = p.len();
    let x1 = erasure_layer(p, alpha);
    let table = (0..=n)
        .flat_map(|a| (0..n).map(move |b| if a < n { a } else { b }))
        .collect();
    SenderSplit::new(vec![x1, p.clone()], table, p.clone())
}

/// (1 - alpha) p(x) on X and alpha on the erasure symbol.
fn erasure_layer(p: &Pmf, alpha: f64) -> Pmf {
    let mut v: Vec<f64> = p.probs().iter().map(|q| (1.0 - alpha) * q).collect();
    v.push(alpha);
    Pmf::new(v).expect("erasure layer of a valid pmf is normalized")
}

/// Which of the two erasure parameters is the coarser (first) layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// alpha' > alpha'': X1 is the alpha'-erasure, (X1, X2) the alpha''-erasure.
    PrimeCoarse,
    /// alpha' <= alpha'': X1 is the alpha''-erasure, (X1, X2) the alpha'-erasure.
    DoublePrimeCoarse,
}

/// A three-layer split merging two erasure splits of the same input.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeLayerSplit {
    pub split: SenderSplit,
    pub branch: Branch,
    /// Erasure probability of X1.
    pub coarse: f64,
    /// Erasure probability of the pair (X1, X2).
    pub fine: f64,
}

/// Cascaded erasures: X1 erases X with probability max(a', a''); X2 erases X with
/// probability min/max; X3 ~ p(x). The symbol is the first unerased layer, so (X1, X2)
/// is an erasure of X with probability min(a', a'').
pub fn compose_three_layer(p: &Pmf, alpha_prime: f64, alpha_dblprime: f64) -> Result<ThreeLayerSplit> {
    check_unit("alpha'", alpha_prime)?;
    check_unit("alpha''", alpha_dblprime)?;
    let branch = if alpha_prime > alpha_dblprime { Branch::PrimeCoarse } else { Branch::DoublePrimeCoarse };
    let coarse = alpha_prime.max(alpha_dblprime);
    let fine = alpha_prime.min(alpha_dblprime);
    let refine = if coarse == 0.0 { 1.0 } else { fine / coarse };
    let n = p.len();
    let mut table = Vec::with_capacity((n + 1) * (n + 1) * n);
    for a in 0..=n {
        for b in 0..=n {
            for c in 0..n {
                table.push(if a < n {
                    a
                } else if b < n {
                    b
                } else {
                    c
                });
            }
        }
    }
    let split = SenderSplit::new(
        vec![erasure_layer(p, coarse), erasure_layer(p, refine), p.clone()],
        table,
        p.clone(),
    )?;
    Ok(ThreeLayerSplit { split, branch, coarse, fine })
}

/// Three-user MAC split: A -> (A1, A2) erased with alpha, B -> (B1, B2) erased with beta,
/// C unsplit. Inputs are ordered (A, B, C).
pub fn mac3_split(p_a: &Pmf, p_b: &Pmf, p_c: &Pmf, alpha: f64, beta: f64) -> Result<LayerSplit> {
    Ok(LayerSplit::new(vec![
        erasure_split(p_a, alpha)?,
        erasure_split(p_b, beta)?,
        SenderSplit::trivial(p_c.clone()),
    ]))
}

/// `n` evenly spaced points on [0, 1] (n >= 2).
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Pmf {
        Pmf::new(vec![0.2, 0.5, 0.3]).unwrap()
    }

    #[test]
    fn erasure_layer_law() {
        let s = erasure_split(&p3(), 0.25).unwrap();
        let x1 = s.layers()[0].probs();
        assert_eq!(x1.len(), 4);
        assert!((x1[3] - 0.25).abs() < 1e-15);
        assert!((x1[1] - 0.75 * 0.5).abs() < 1e-15);
        assert!(s.pushforward_deviation() < 1e-15);
    }

    #[test]
    fn erasure_decomposition() {
        let s = erasure_split(&p3(), 0.25).unwrap();
        // Knowing X1: three point masses and one copy of p(x).
        let d = s.decompose(0b01);
        assert_eq!(d.len(), 4);
        let erased = d.iter().find(|(_, l)| l.iter().filter(|&&v| v > 0.0).count() == 3).unwrap();
        assert!((erased.0 - 0.25).abs() < 1e-15);
        // Knowing both layers pins x.
        assert_eq!(s.decompose(0b11).len(), 3);
    }

    #[test]
    fn alpha_out_of_range() {
        assert!(erasure_split(&p3(), 1.5).is_err());
        assert!(compose_three_layer(&p3(), -0.1, 0.2).is_err());
    }

    #[test]
    fn three_layer_pair_is_fine_erasure() {
        let t = compose_three_layer(&p3(), 0.7, 0.3).unwrap();
        assert_eq!(t.branch, Branch::PrimeCoarse);
        // P(X1 = e, X2 = e) = fine.
        let pe: f64 = t.split.layers()[0].probs()[3] * t.split.layers()[1].probs()[3];
        assert!((pe - 0.3).abs() < 1e-15);
        assert!(t.split.pushforward_deviation() < 1e-15);
        let t = compose_three_layer(&p3(), 0.2, 0.2).unwrap();
        assert_eq!(t.branch, Branch::DoublePrimeCoarse);
        assert_eq!(t.split.layers()[1].probs()[3], 1.0);
    }

    #[test]
    fn json_round_trip() {
        let s = LayerSplit::new(vec![erasure_split(&p3(), 0.4).unwrap(), SenderSplit::trivial(Pmf::uniform(2))]);
        let back = LayerSplit::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn bad_table_rejected() {
        let r = SenderSplit::new(vec![Pmf::uniform(2)], vec![0, 0], Pmf::uniform(2));
        assert!(r.is_err());
    }
}
