//! Han-Kobayashi coding through layered single-user decoding, and the three-user MAC
//! building block it rests on.
//!
//! The Han-Kobayashi channel has four inputs S, T (sender 1: common, private) and U, V
//! (sender 2: common, private). Receiver 1 decodes S, T, U and treats V as noise; receiver
//! 2 decodes S, U, V and treats T as noise. Rates are ordered (R10, R11, R20, R22).

use rayon::prelude::*;
use serde::Serialize;

use super::fm::{fm_project, FmMode, FmSystem};
use super::layered::lo_rates;
use super::orders::LayerOrder;
use super::region2::RateRegion2;
use crate::error::{Error, Result};
use crate::mi::{LayerRef, Mi, MiCache};
use crate::splits::{compose_three_layer, erasure_split, mac3_split, unit_grid, Branch, LayerSplit, SenderSplit};

/// `coeffs . (R10, R11, R20, R22) <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constraint4 {
    pub coeffs: [u8; 4],
    pub rhs: f64,
}

/// Intersection of {0,1}-coefficient half-spaces over (R10, R11, R20, R22) >= 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RateRegion4 {
    pub constraints: Vec<Constraint4>,
}

impl RateRegion4 {
    pub fn push(&mut self, coeffs: [u8; 4], rhs: f64) {
        if rhs.is_finite() && coeffs.iter().any(|&c| c > 0) {
            self.constraints.push(Constraint4 { coeffs, rhs: rhs.max(0.0) });
        }
    }

    pub fn intersect(&self, other: &RateRegion4) -> RateRegion4 {
        let mut c = self.constraints.clone();
        c.extend_from_slice(&other.constraints);
        RateRegion4 { constraints: c }
    }

    pub fn contains(&self, r: [f64; 4], tol: f64) -> bool {
        r.iter().all(|&v| v >= -tol)
            && self.constraints.iter().all(|c| {
                c.coeffs.iter().zip(&r).map(|(&a, &v)| a as f64 * v).sum::<f64>() <= c.rhs + tol
            })
    }

    /// Projection onto (R1, R2) = (R10 + R11, R20 + R22).
    pub fn project_to_2(&self) -> Result<RateRegion2> {
        let mut sys = FmSystem::new(vec![0, 0, 1, 1])?;
        for c in &self.constraints {
            sys.add_coeffs(&c.coeffs.map(i64::from), c.rhs)?;
        }
        Ok(fm_project(&sys, FmMode::Numeric)?.to_region("hk"))
    }

    /// Vertices of the polytope, from every 4-subset of the constraints plus the
    /// nonnegativity faces.
    pub fn vertices(&self, tol: f64) -> Vec<[f64; 4]> {
        let mut rows: Vec<([f64; 4], f64)> = self
            .constraints
            .iter()
            .map(|c| (c.coeffs.map(f64::from), c.rhs))
            .collect();
        for i in 0..4 {
            let mut a = [0.0; 4];
            a[i] = -1.0;
            rows.push((a, 0.0));
        }
        let n = rows.len();
        let mut out: Vec<[f64; 4]> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let Some(v) = solve4([rows[a], rows[b], rows[c], rows[d]]) else { continue };
                        if self.contains(v, tol)
                            && !out.iter().any(|u| u.iter().zip(&v).all(|(x, y)| (x - y).abs() <= tol))
                        {
                            out.push(v);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Solves a 4x4 system by Gaussian elimination with partial pivoting.
fn solve4(rows: [([f64; 4], f64); 4]) -> Option<[f64; 4]> {
    let mut m: Vec<[f64; 5]> =
        rows.iter().map(|(a, b)| [a[0], a[1], a[2], a[3], *b]).collect();
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..4 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for k in col..5 {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([0, 1, 2, 3].map(|i| m[i][4] / m[i][i]))
}

/// Erasure parameters of the Han-Kobayashi split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HkParams {
    pub alpha_prime: f64,
    pub alpha_dblprime: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// S merged from (alpha', alpha'') into three layers, T and V erasure-split with beta and
/// gamma, U unsplit.
pub fn hk_split(cache: &MiCache, p: &HkParams) -> Result<(LayerSplit, Branch)> {
    let ch = cache.channel();
    if ch.num_inputs() != 4 || ch.num_receivers() != 2 {
        return Err(Error::InvalidChannel("expected four inputs and two receivers".into()));
    }
    let s = compose_three_layer(ch.input_pmf(0), p.alpha_prime, p.alpha_dblprime)?;
    let split = LayerSplit::new(vec![
        s.split,
        erasure_split(ch.input_pmf(1), p.beta)?,
        SenderSplit::trivial(ch.input_pmf(2).clone()),
        erasure_split(ch.input_pmf(3), p.gamma)?,
    ]);
    Ok((split, s.branch))
}

const HK_ORDERS: [&str; 6] = [
    "S1 T1 S2 S3 U T2",
    "T1 U S1 T2 S2 S3",
    "T1 S1 U S2 S3 T2",
    "S1 S2 T1 S3 U T2",
    "T1 U S1 S2 T2 S3",
    "T1 S1 S2 U S3 T2",
];

/// Layer order `lambda` (1..6 at receiver 1; 7..12 at receiver 2, with T replaced by V).
pub fn hk_layer_order(lambda: usize) -> Result<LayerOrder> {
    if !(1..=12).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("layer order index {lambda} is not in 1..12")));
    }
    let text = HK_ORDERS[(lambda - 1) % 6];
    let seq = text
        .split(' ')
        .map(|tok| {
            let input = match &tok[..1] {
                "S" => 0,
                "T" if lambda <= 6 => 1,
                "T" => 3,
                _ => 2,
            };
            let layer = tok[1..].parse::<usize>().map_or(0, |l| l - 1);
            LayerRef::new(input, layer)
        })
        .collect();
    LayerOrder::new(seq)
}

/// Box bounds of one receiver for one layer order, as (R10, R11, R20, R22) with infinity
/// for rates that receiver does not constrain.
pub fn hk_receiver_bounds(mi: &Mi<'_>, lambda: usize) -> Result<[f64; 4]> {
    let order = hk_layer_order(lambda)?;
    let k = usize::from(lambda > 6);
    let r = lo_rates(mi, k, &order);
    let get = |i: usize| r[i].unwrap_or(f64::INFINITY);
    Ok([get(0), get(1), get(2), get(3)])
}

/// R1(p', lambda1) n R2(p', lambda2).
pub fn region_hk(cache: &MiCache, params: &HkParams, lambda1: usize, lambda2: usize) -> Result<RateRegion4> {
    if !(1..=6).contains(&lambda1) || !(7..=12).contains(&lambda2) {
        return Err(Error::InvalidParameter(format!(
            "need lambda1 in 1..6 and lambda2 in 7..12, got {lambda1}, {lambda2}"
        )));
    }
    let (split, _) = hk_split(cache, params)?;
    let mi = Mi::new(cache, &split)?;
    let mut r = RateRegion4::default();
    for lambda in [lambda1, lambda2] {
        let b = hk_receiver_bounds(&mi, lambda)?;
        for (i, &v) in b.iter().enumerate() {
            let mut c = [0u8; 4];
            c[i] = 1;
            r.push(c, v);
        }
    }
    Ok(r)
}

/// MAC constraints of receiver k over `inputs` (other inputs are noise): for every
/// nonempty subset A, sum of rates in A <= I(A; Y_k | inputs \ A). Returned as
/// (membership mask over `inputs`, bound).
pub fn mac_constraints(cache: &MiCache, k: usize, inputs: &[usize]) -> Result<Vec<(u32, f64)>> {
    let ch = cache.channel();
    let split = LayerSplit::trivial(&(0..ch.num_inputs()).map(|i| ch.input_pmf(i).clone()).collect::<Vec<_>>());
    let mi = Mi::new(cache, &split)?;
    let n = ch.num_inputs();
    let mut out = Vec::new();
    for sub in 1u32..(1 << inputs.len()) {
        let mut t = vec![0u64; n];
        let mut g = vec![0u64; n];
        for (j, &i) in inputs.iter().enumerate() {
            if sub >> j & 1 == 1 {
                t[i] = 1;
            } else {
                g[i] = 1;
            }
        }
        out.push((sub, mi.cond_mi(k, &t, &g)));
    }
    Ok(out)
}

/// R1,MAC(S, T, U; Y1) n R2,MAC(S, U, V; Y2) over (R10, R11, R20, R22).
pub fn hk_mac_region(cache: &MiCache) -> Result<RateRegion4> {
    let mut r = RateRegion4::default();
    // Channel input index -> rate coordinate.
    for (k, inputs) in [(0usize, [0usize, 1, 2]), (1, [0, 3, 2])] {
        for (sub, v) in mac_constraints(cache, k, &inputs)? {
            let mut c = [0u8; 4];
            for (j, &i) in inputs.iter().enumerate() {
                if sub >> j & 1 == 1 {
                    c[if i == 3 { 3 } else { i }] = 1;
                }
            }
            r.push(c, v);
        }
    }
    Ok(r)
}

/// Result of the Theorem-style coverage check over an erasure-parameter grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HkCoverage {
    pub vertices: usize,
    /// Largest over vertices of the smallest l-infinity shortfall to a grid region.
    pub worst_gap: f64,
}

/// Checks that every vertex of R1,MAC n R2,MAC lies (within the reported gap) in some
/// R1(p', lambda1) n R2(p', lambda2) with p' on the `grid`^4 erasure lattice, using the
/// branch pairing lambda1 in 1..3 with lambda2 in 10..12 when alpha' > alpha'', and
/// lambda1 in 4..6 with lambda2 in 7..9 otherwise.
///
/// Receiver 1's bounds depend only on (alpha', beta, lambda1) and receiver 2's only on
/// (alpha'', gamma, lambda2) within a branch, so the two sides are tabulated separately
/// and joined under the branch condition.
pub fn hk_coverage(cache: &MiCache, grid: usize) -> Result<HkCoverage> {
    let g = unit_grid(grid);
    let verts = hk_mac_region(cache)?.vertices(1e-9);
    // side[(receiver, lambda)][param index][beta index] = box
    let side = |rx: usize, lambda: usize| -> Result<Vec<Vec<[f64; 4]>>> {
        g.par_iter()
            .map(|&a| {
                g.iter()
                    .map(|&b| {
                        let coarse_group = matches!(lambda, 1..=3 | 10..=12);
                        // The parameter not seen by this receiver only fixes the branch.
                        let other = match (rx, coarse_group) {
                            (0, true) => a / 2.0,
                            (0, false) => 1.0,
                            (_, true) => (1.0 + a) / 2.0,
                            (_, false) => 0.0,
                        };
                        let params = if rx == 0 {
                            HkParams { alpha_prime: a, alpha_dblprime: other, beta: b, gamma: 0.5 }
                        } else {
                            HkParams { alpha_prime: other, alpha_dblprime: a, beta: 0.5, gamma: b }
                        };
                        let (split, _) = hk_split(cache, &params)?;
                        hk_receiver_bounds(&Mi::new(cache, &split)?, lambda)
                    })
                    .collect()
            })
            .collect()
    };
    let mut tables = Vec::new();
    for lambda in 1..=12 {
        tables.push(side(usize::from(lambda > 6), lambda)?);
    }
    let shortfall = |v: &[f64; 4], b: &[f64; 4]| {
        v.iter().zip(b).map(|(x, y)| (x - y).max(0.0)).fold(0.0, f64::max)
    };
    let mut worst: f64 = 0.0;
    for v in &verts {
        // best[lambda][param index] = min over the private parameter of the shortfall
        let best: Vec<Vec<f64>> = tables
            .iter()
            .map(|t| t.iter().map(|row| row.iter().map(|b| shortfall(v, b)).fold(f64::INFINITY, f64::min)).collect())
            .collect();
        let mut gap = f64::INFINITY;
        for i in 0..grid {
            for j in 0..grid {
                // i indexes alpha', j indexes alpha''.
                let (l1, l2) = if g[i] > g[j] { (0..3, 9..12) } else { (3..6, 6..9) };
                let d1 = l1.map(|l| best[l][i]).fold(f64::INFINITY, f64::min);
                let d2 = l2.map(|l| best[l][j]).fold(f64::INFINITY, f64::min);
                gap = gap.min(d1.max(d2));
            }
        }
        worst = worst.max(gap);
    }
    Ok(HkCoverage { vertices: verts.len(), worst_gap: worst })
}

/// Three-user MAC region: seven constraints (mask over (A, B, C), bound) and the six
/// successive-decoding corners, labeled by decoding order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mac3Region {
    pub constraints: Vec<(u32, f64)>,
    pub corners: Vec<(String, [f64; 3])>,
}

impl Mac3Region {
    pub fn contains(&self, r: [f64; 3], tol: f64) -> bool {
        r.iter().all(|&v| v >= -tol)
            && self.constraints.iter().all(|&(m, c)| {
                (0..3).filter(|j| m >> j & 1 == 1).map(|j| r[j]).sum::<f64>() <= c + tol
            })
    }

    pub fn corner(&self, label: &str) -> Option<[f64; 3]> {
        self.corners.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }
}

pub const MAC3_CORNERS: [&str; 6] = ["ABC", "BAC", "BCA", "CBA", "CAB", "ACB"];

pub fn region_mac3(cache: &MiCache) -> Result<Mac3Region> {
    let ch = cache.channel();
    if ch.num_inputs() != 3 {
        return Err(Error::InvalidChannel("expected a three-input channel".into()));
    }
    let constraints = mac_constraints(cache, 0, &[0, 1, 2])?;
    let split = LayerSplit::trivial(&(0..3).map(|i| ch.input_pmf(i).clone()).collect::<Vec<_>>());
    let mi = Mi::new(cache, &split)?;
    let corners = MAC3_CORNERS
        .iter()
        .map(|label| {
            let mut known = [0u64; 3];
            let mut r = [0.0; 3];
            for ch in label.bytes() {
                let i = (ch - b'A') as usize;
                let mut t = [0u64; 3];
                t[i] = 1;
                r[i] = mi.cond_mi(0, &t, &known);
                known[i] = 1;
            }
            (label.to_string(), r)
        })
        .collect();
    Ok(Mac3Region { constraints, corners })
}

const MAC3_ORDERS: [&str; 3] = ["A1 B1 A2 C B2", "B1 C A1 B2 A2", "B1 A1 C A2 B2"];

/// Layer order `lambda` in 1..3 over A = (A1, A2), B = (B1, B2), C.
pub fn mac3_layer_order(lambda: usize) -> Result<LayerOrder> {
    let text = MAC3_ORDERS
        .get(lambda.wrapping_sub(1))
        .ok_or_else(|| Error::InvalidParameter(format!("layer order index {lambda} is not in 1..3")))?;
    LayerOrder::new(
        text.split(' ')
            .map(|t| LayerRef::new((t.as_bytes()[0] - b'A') as usize, t[1..].parse::<usize>().map_or(0, |l| l - 1)))
            .collect(),
    )
}

/// Rates of the layered MAC with A and B erasure-split by (alpha, beta).
pub fn mac3_layered_rates(cache: &MiCache, alpha: f64, beta: f64, lambda: usize) -> Result<[f64; 3]> {
    let ch = cache.channel();
    if ch.num_inputs() != 3 {
        return Err(Error::InvalidChannel("expected a three-input channel".into()));
    }
    let split = mac3_split(ch.input_pmf(0), ch.input_pmf(1), ch.input_pmf(2), alpha, beta)?;
    let mi = Mi::new(cache, &split)?;
    let r = lo_rates(&mi, 0, &mac3_layer_order(lambda)?);
    Ok([0, 1, 2].map(|i| r[i].unwrap_or(0.0)))
}

/// The convex combination of corners that the layered rates reduce to.
pub fn mac3_corner_combination(region: &Mac3Region, alpha: f64, beta: f64, lambda: usize) -> Result<[f64; 3]> {
    let c = |l: &str| region.corner(l).expect("all six corners present");
    let terms: Vec<(f64, [f64; 3])> = match lambda {
        1 => vec![
            ((1.0 - alpha) * (1.0 - beta), c("ABC")),
            (alpha * (1.0 - beta), c("BAC")),
            (beta, c("ACB")),
        ],
        2 => vec![
            ((1.0 - alpha) * beta, c("CAB")),
            (alpha * beta, c("CBA")),
            (1.0 - beta, c("BCA")),
        ],
        3 => vec![
            ((1.0 - alpha) * (1.0 - beta), c("BAC")),
            ((1.0 - alpha) * beta, c("ACB")),
            (alpha * (1.0 - beta), c("BCA")),
            (alpha * beta, c("CAB")),
        ],
        _ => return Err(Error::InvalidParameter(format!("layer order index {lambda} is not in 1..3"))),
    };
    let mut r = [0.0; 3];
    for (w, v) in terms {
        for i in 0..3 {
            r[i] += w * v[i];
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{mac3_corpus, tiny_hk};

    #[test]
    fn hk_orders_parse() {
        assert_eq!(hk_layer_order(1).unwrap().to_string(), "X1>W1>X2>X3>U1>W2");
        assert_eq!(hk_layer_order(7).unwrap().to_string(), "X1>V1>X2>X3>U1>V2");
        assert!(hk_layer_order(13).is_err());
        assert!(mac3_layer_order(0).is_err());
    }

    #[test]
    fn hk_region1_three_term_sum() {
        let cache = MiCache::new(tiny_hk(3));
        let p = HkParams { alpha_prime: 0.6, alpha_dblprime: 0.3, beta: 0.4, gamma: 0.7 };
        let (split, branch) = hk_split(&cache, &p).unwrap();
        assert_eq!(branch, Branch::PrimeCoarse);
        let mi = Mi::new(&cache, &split).unwrap();
        let b = hk_receiver_bounds(&mi, 1).unwrap();
        // masks over (S, T, U, V)
        let want = mi.cond_mi(0, &[1, 0, 0, 0], &[0, 0, 0, 0])
            + mi.cond_mi(0, &[2, 0, 0, 0], &[1, 1, 0, 0])
            + mi.cond_mi(0, &[4, 0, 0, 0], &[3, 1, 0, 0]);
        assert!((b[0] - want).abs() < 1e-12);
        assert!(b[3].is_infinite());
    }

    #[test]
    fn receiver_bounds_ignore_the_other_parameter() {
        let cache = MiCache::new(tiny_hk(5));
        let at = |app: f64, gamma: f64| {
            let p = HkParams { alpha_prime: 0.8, alpha_dblprime: app, beta: 0.3, gamma };
            let (s, _) = hk_split(&cache, &p).unwrap();
            hk_receiver_bounds(&Mi::new(&cache, &s).unwrap(), 2).unwrap()
        };
        let (a, b) = (at(0.1, 0.2), at(0.7, 0.9));
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn mac3_corners_satisfy_constraints_with_tight_sum() {
        for ch in mac3_corpus(11, 3) {
            let cache = MiCache::new(ch);
            let r = region_mac3(&cache).unwrap();
            let total = r.constraints.iter().find(|c| c.0 == 7).unwrap().1;
            for (_, v) in &r.corners {
                assert!(r.contains(*v, 1e-12));
                assert!((v.iter().sum::<f64>() - total).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unsplit_order_one_is_abc_corner() {
        let cache = MiCache::new(mac3_corpus(2, 1).remove(0));
        let r = region_mac3(&cache).unwrap();
        let v = mac3_layered_rates(&cache, 0.0, 0.0, 1).unwrap();
        let c = r.corner("ABC").unwrap();
        assert!((0..3).all(|i| (v[i] - c[i]).abs() < 1e-12));
    }

    #[test]
    fn projection_of_box_is_sum() {
        let mut r = RateRegion4::default();
        for (i, v) in [0.1, 0.2, 0.3, 0.4].iter().enumerate() {
            let mut c = [0; 4];
            c[i] = 1;
            r.push(c, *v);
        }
        let p = r.project_to_2().unwrap();
        assert!((p.r1_max() - 0.3).abs() < 1e-15 && (p.r2_max() - 0.7).abs() < 1e-15);
        assert_eq!(r.vertices(1e-12).len(), 16);
    }
}
