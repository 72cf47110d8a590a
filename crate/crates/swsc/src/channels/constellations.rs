//! Constellations and symbol-level superposition maps.
//!
//! A [`SymbolMap`] turns a tuple of layer symbols into one channel symbol. Tuples are
//! indexed row-major with layer 0 most significant. Maps built from constellations carry
//! the output points; maps built from tables (e.g. erasure splits) only carry indices.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{decode_tuple, Pmf};
use crate::error::{Error, Result};

const POINT_TOL: f64 = 1e-9;

/// A finite signal set with a bit labeling.
///
/// `points[l]` is the symbol carrying label `l`; label bits are read MSB first.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    name: String,
    points: Vec<Complex64>,
    bits: usize,
}

impl Constellation {
    /// The labeling is the index, which makes it a bijection by construction; the point
    /// set must have size 2^bits, distinct points and unit mean power.
    pub fn new(name: impl Into<String>, points: Vec<Complex64>) -> Result<Self> {
        let name = name.into();
        let n = points.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("{name}: size {n} is not a power of two")));
        }
        for i in 0..n {
            for j in 0..i {
                if (points[i] - points[j]).norm() < POINT_TOL {
                    return Err(Error::InvalidParameter(format!("{name}: repeated point")));
                }
            }
        }
        let power = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / n as f64;
        if (power - 1.0).abs() > POINT_TOL {
            return Err(Error::InvalidParameter(format!("{name}: mean power {power} is not 1")));
        }
        Ok(Self { name, points, bits: n.trailing_zeros() as usize })
    }

    /// Bit 0 maps to +1.
    pub fn bpsk() -> Self {
        Self::new("bpsk", vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).unwrap()
    }

    /// First bit drives the real sign, second the imaginary sign.
    pub fn qpsk() -> Self {
        let s = |b: usize| if b == 0 { 1.0 } else { -1.0 };
        let pts = (0..4)
            .map(|l| Complex64::new(s(l >> 1), s(l & 1)) * FRAC_1_SQRT_2)
            .collect();
        Self::new("qpsk", pts).unwrap()
    }

    /// Natural-labeled 4PAM as a single layer: label (b_hi, b_lo) -> (s(b_lo) + 2 s(b_hi))/sqrt(5).
    pub fn pam4() -> Self {
        let s = |b: usize| if b == 0 { 1.0 } else { -1.0 };
        let pts = (0..4)
            .map(|l| Complex64::new((s(l & 1) + 2.0 * s(l >> 1)) / 5f64.sqrt(), 0.0))
            .collect();
        Self::new("4pam", pts).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Bit `k` (0 = MSB) of label `label`.
    pub fn bit(&self, label: usize, k: usize) -> u8 {
        ((label >> (self.bits - 1 - k)) & 1) as u8
    }

    /// Label of the point equal to `p` (within 1e-9).
    pub fn index_of(&self, p: Complex64) -> Option<usize> {
        self.points.iter().position(|q| (q - p).norm() < POINT_TOL)
    }

    pub fn is_real(&self) -> bool {
        self.points.iter().all(|p| p.im.abs() < POINT_TOL)
    }
}

/// Deterministic map from a tuple of layer symbols to a channel symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMap {
    name: String,
    layer_sizes: Vec<usize>,
    table: Vec<usize>,
    output_size: usize,
    /// Layer constellations; empty for abstract table maps.
    layers: Vec<Constellation>,
    /// Output points (one complex entry per antenna); empty for abstract table maps.
    points: Vec<Vec<Complex64>>,
    target: Option<Pmf>,
}

impl SymbolMap {
    /// An abstract map given by its lookup table.
    pub fn from_table(
        name: impl Into<String>,
        layer_sizes: Vec<usize>,
        table: Vec<usize>,
        output_size: usize,
    ) -> Result<Self> {
        let name = name.into();
        let domain: usize = layer_sizes.iter().product();
        if layer_sizes.contains(&0) || table.len() != domain {
            return Err(Error::InvalidParameter(format!(
                "{name}: table has {} entries, domain has {domain}",
                table.len()
            )));
        }
        if table.iter().any(|&v| v >= output_size) {
            return Err(Error::InvalidParameter(format!("{name}: table entry out of range")));
        }
        Ok(Self {
            name,
            layer_sizes,
            table,
            output_size,
            layers: Vec::new(),
            points: Vec::new(),
            target: None,
        })
    }

    /// Tabulates `f` over all layer-symbol tuples. Equal outputs (within 1e-9) share an
    /// output index, assigned in order of first appearance.
    pub fn from_formula(
        name: impl Into<String>,
        layers: Vec<Constellation>,
        f: impl Fn(&[Complex64]) -> Vec<Complex64>,
    ) -> Result<Self> {
        let name = name.into();
        let layer_sizes: Vec<usize> = layers.iter().map(Constellation::len).collect();
        let domain: usize = layer_sizes.iter().product();
        let mut digits = vec![0; layers.len()];
        let mut points: Vec<Vec<Complex64>> = Vec::new();
        let mut table = Vec::with_capacity(domain);
        for t in 0..domain {
            decode_tuple(t, &layer_sizes, &mut digits);
            let args: Vec<Complex64> = digits.iter().zip(&layers).map(|(&d, c)| c.points[d]).collect();
            let out = f(&args);
            let idx = points.iter().position(|p| {
                p.len() == out.len() && p.iter().zip(&out).all(|(a, b)| (a - b).norm() < POINT_TOL)
            });
            table.push(idx.unwrap_or_else(|| {
                points.push(out);
                points.len() - 1
            }));
        }
        Ok(Self {
            name,
            output_size: points.len(),
            layer_sizes,
            table,
            layers,
            points,
            target: None,
        })
    }

    /// Declares the target marginal p(x) the map must reproduce (the p' ~ p condition).
    pub fn with_target(mut self, target: Pmf) -> Result<Self> {
        if target.len() != self.output_size {
            return Err(Error::InvalidParameter(format!("{}: target size mismatch", self.name)));
        }
        self.target = Some(target);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn layers(&self) -> &[Constellation] {
        &self.layers
    }

    pub fn target(&self) -> Option<&Pmf> {
        self.target.as_ref()
    }

    /// Output points indexed by output symbol; empty for table maps.
    pub fn output_points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    /// Number of transmit antennas (1 unless the map is a MIMO stacking).
    pub fn antennas(&self) -> usize {
        self.points.first().map_or(1, Vec::len)
    }

    /// True when every output point is real.
    pub fn is_real(&self) -> bool {
        self.points.iter().flatten().all(|p| p.im.abs() < POINT_TOL)
    }

    /// Real dimensions of the output (antennas, doubled if complex).
    pub fn real_dims(&self) -> usize {
        self.antennas() * if self.is_real() { 1 } else { 2 }
    }

    /// Output index of a layer-symbol tuple.
    pub fn apply(&self, digits: &[usize]) -> usize {
        self.table[super::encode_tuple(digits, &self.layer_sizes)]
    }

    /// Evaluates the map on layer points, e.g. `eval(&[1, 1])` for (+1, +1) BPSK layers.
    pub fn eval(&self, args: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.layers.is_empty() || args.len() != self.layers.len() {
            return Err(Error::InvalidParameter(format!(
                "{}: expected {} layer symbols",
                self.name,
                self.layers.len()
            )));
        }
        let digits = args
            .iter()
            .zip(&self.layers)
            .map(|(&a, c)| {
                c.index_of(a).ok_or_else(|| {
                    Error::InvalidParameter(format!("{a} is not a point of {}", c.name()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.points[self.apply(&digits)].clone())
    }

    /// Mean power per antenna under uniform layer inputs.
    pub fn mean_power(&self) -> f64 {
        let domain = self.table.len() as f64;
        self.table
            .iter()
            .map(|&o| self.points[o].iter().map(|p| p.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            / (domain * self.antennas() as f64)
    }

    /// Distribution of the output when layers are independent with the given pmfs.
    pub fn pushforward(&self, layer_pmfs: &[Pmf]) -> Result<Vec<f64>> {
        if layer_pmfs.len() != self.layer_sizes.len()
            || layer_pmfs.iter().zip(&self.layer_sizes).any(|(p, &s)| p.len() != s)
        {
            return Err(Error::InvalidParameter(format!("{}: layer pmf sizes mismatch", self.name)));
        }
        let mut out = vec![0.0; self.output_size];
        let mut digits = vec![0; self.layer_sizes.len()];
        for (t, &o) in self.table.iter().enumerate() {
            decode_tuple(t, &self.layer_sizes, &mut digits);
            out[o] += digits
                .iter()
                .zip(layer_pmfs)
                .map(|(&d, p)| p.probs()[d])
                .product::<f64>();
        }
        Ok(out)
    }

    /// Checks p' ~ p: the pushforward of `layer_pmfs` equals the declared target within `tol`.
    /// Returns the max absolute deviation; maps without a target are trivially preserving.
    pub fn marginal_deviation(&self, layer_pmfs: &[Pmf]) -> Result<f64> {
        let push = self.pushforward(layer_pmfs)?;
        Ok(match &self.target {
            Some(t) => push
                .iter()
                .zip(t.probs())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
            None => 0.0,
        })
    }
}

/// X = (X1 + 2 X2)/sqrt(5) over BPSK layers.
pub fn make_4pam_natural() -> SymbolMap {
    let b = Constellation::bpsk();
    SymbolMap::from_formula("4pam_natural", vec![b.clone(), b], |x| {
        vec![(x[0] + 2.0 * x[1]) / 5f64.sqrt()]
    })
    .unwrap()
}

/// X = (X1 + 2 X1 X2)/sqrt(5) over BPSK layers.
pub fn make_4pam_gray() -> SymbolMap {
    let b = Constellation::bpsk();
    SymbolMap::from_formula("4pam_gray", vec![b.clone(), b], |x| {
        vec![(x[0] + 2.0 * x[0] * x[1]) / 5f64.sqrt()]
    })
    .unwrap()
}

/// A single-layer map carrying a constellation unchanged.
pub fn make_single(c: Constellation) -> SymbolMap {
    let name = c.name().to_string();
    SymbolMap::from_formula(name, vec![c], |x| vec![x[0]]).unwrap()
}

/// Per-antenna identity stacking: `t` layers, layer i on antenna i.
pub fn make_mimo_antenna(t: usize, c: Constellation) -> Result<SymbolMap> {
    if t == 0 {
        return Err(Error::InvalidParameter("mimo_antenna needs at least one layer".into()));
    }
    SymbolMap::from_formula(format!("mimo_antenna_{t}"), vec![c; t], |x| x.to_vec())
}

/// The higher-order decompositions of 8PAM, 16QAM and multi-antenna stacking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HigherMap {
    /// (X1 + 2 X2 + 4 X3)/sqrt(21) over three BPSK layers.
    Pam8ThreeBpsk,
    /// (X1 + 2 sqrt(5) X2)/sqrt(21), X1 BPSK and X2 natural 4PAM.
    Pam8BpskPam4,
    /// (X1 + 2 X2)/sqrt(5) over two QPSK layers.
    Qam16TwoQpsk,
    /// (X1 + i X2)/sqrt(2) over two natural 4PAM layers.
    Qam16TwoPam4,
    /// Two BPSK layers, one per antenna.
    MimoAntenna,
}

impl FromStr for HigherMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "8pam_3bpsk" => Self::Pam8ThreeBpsk,
            "8pam_bpsk_4pam" => Self::Pam8BpskPam4,
            "16qam_2qpsk" => Self::Qam16TwoQpsk,
            "16qam_2x4pam" => Self::Qam16TwoPam4,
            "mimo_antenna" => Self::MimoAntenna,
            _ => return Err(Error::Unknown { kind: "symbol map", name: s.into() }),
        })
    }
}

pub fn make_higher_maps(kind: HigherMap) -> SymbolMap {
    let b = Constellation::bpsk();
    match kind {
        HigherMap::Pam8ThreeBpsk => SymbolMap::from_formula("8pam_3bpsk", vec![b.clone(), b.clone(), b], |x| {
            vec![(x[0] + 2.0 * x[1] + 4.0 * x[2]) / 21f64.sqrt()]
        }),
        HigherMap::Pam8BpskPam4 => SymbolMap::from_formula("8pam_bpsk_4pam", vec![b, Constellation::pam4()], |x| {
            vec![(x[0] + 2.0 * 5f64.sqrt() * x[1]) / 21f64.sqrt()]
        }),
        HigherMap::Qam16TwoQpsk => {
            let q = Constellation::qpsk();
            SymbolMap::from_formula("16qam_2qpsk", vec![q.clone(), q], |x| {
                vec![(x[0] + 2.0 * x[1]) / 5f64.sqrt()]
            })
        }
        HigherMap::Qam16TwoPam4 => {
            let p = Constellation::pam4();
            SymbolMap::from_formula("16qam_2x4pam", vec![p.clone(), p], |x| {
                vec![(x[0] + Complex64::i() * x[1]) * FRAC_1_SQRT_2]
            })
        }
        HigherMap::MimoAntenna => make_mimo_antenna(2, b),
    }
    .unwrap()
}

/// Resolves a map name as used in channel JSON and on the command line.
pub fn map_by_name(name: &str) -> Result<SymbolMap> {
    match name {
        "bpsk" => Ok(make_single(Constellation::bpsk())),
        "qpsk" => Ok(make_single(Constellation::qpsk())),
        "4pam" => Ok(make_single(Constellation::pam4())),
        "4pam_natural" => Ok(make_4pam_natural()),
        "4pam_gray" => Ok(make_4pam_gray()),
        other => other.parse().map(make_higher_maps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn r(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn octant(k: i32) -> Complex64 {
        Complex64::from_polar(1.0, k as f64 * PI / 4.0)
    }

    #[test]
    fn natural_4pam_points() {
        let m = make_4pam_natural();
        let s5 = 5f64.sqrt();
        assert!((m.eval(&[r(1.0), r(1.0)]).unwrap()[0] - r(3.0 / s5)).norm() < 1e-15);
        assert!((m.eval(&[r(-1.0), r(-1.0)]).unwrap()[0] - r(-3.0 / s5)).norm() < 1e-15);
        assert!((m.mean_power() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gray_4pam_same_point_set() {
        let g = make_4pam_gray();
        let s5 = 5f64.sqrt();
        assert!((g.eval(&[r(1.0), r(1.0)]).unwrap()[0] - r(3.0 / s5)).norm() < 1e-15);
        assert!((g.eval(&[r(-1.0), r(1.0)]).unwrap()[0] - r(-3.0 / s5)).norm() < 1e-15);
        let mut a: Vec<f64> = g.output_points().iter().map(|p| p[0].re).collect();
        let mut b: Vec<f64> = make_4pam_natural().output_points().iter().map(|p| p[0].re).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
    }

    #[test]
    fn higher_maps() {
        let m = make_higher_maps(HigherMap::Pam8ThreeBpsk);
        let v = m.eval(&[r(1.0), r(1.0), r(1.0)]).unwrap()[0];
        assert!((v - r(7.0 / 21f64.sqrt())).norm() < 1e-15);
        assert_eq!(m.output_size(), 8);

        let q = make_higher_maps(HigherMap::Qam16TwoPam4);
        let a = r(3.0 / 5f64.sqrt());
        let v = q.eval(&[a, a]).unwrap()[0];
        assert!((v - Complex64::new(3.0, 3.0) / 10f64.sqrt()).norm() < 1e-15);
        assert_eq!(q.output_size(), 16);
        assert_eq!(q.real_dims(), 2);

        let mimo = make_higher_maps(HigherMap::MimoAntenna);
        assert_eq!(mimo.eval(&[r(1.0), r(-1.0)]).unwrap(), vec![r(1.0), r(-1.0)]);
        assert_eq!(mimo.real_dims(), 2);

        assert_eq!(make_higher_maps(HigherMap::Qam16TwoQpsk).output_size(), 16);
        assert_eq!(make_higher_maps(HigherMap::Pam8BpskPam4).output_size(), 8);
    }

    #[test]
    fn every_factory_has_unit_power() {
        let kinds = ["bpsk", "qpsk", "4pam", "4pam_natural", "4pam_gray", "8pam_3bpsk", "8pam_bpsk_4pam", "16qam_2qpsk", "16qam_2x4pam", "mimo_antenna"];
        for k in kinds {
            let m = map_by_name(k).unwrap();
            assert!((m.mean_power() - 1.0).abs() < 1e-9, "{k}: {}", m.mean_power());
        }
        assert!(map_by_name("32apsk").is_err());
    }

    #[test]
    fn qpsk_points_on_diagonals() {
        let q = Constellation::qpsk();
        for k in [1, 3, 5, 7] {
            assert!(q.index_of(octant(k)).is_some());
        }
    }

    #[test]
    fn uniform_layers_push_to_uniform_pam() {
        let m = make_4pam_natural().with_target(Pmf::uniform(4)).unwrap();
        let d = m.marginal_deviation(&[Pmf::uniform(2), Pmf::uniform(2)]).unwrap();
        assert!(d < 1e-12);
    }
}
