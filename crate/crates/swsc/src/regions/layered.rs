//! Rate-splitting and sliding-window superposition coding regions.

use rayon::prelude::*;

use super::fm::{fm_project, FmMode, FmSystem};
use super::orders::{DecodingOrder, Family31, LayerOrder, OrderPair, PartOrder};
use super::region2::{Conjunction, RateRegion2};
use crate::channels::Pmf;
use crate::error::{Error, Result};
use crate::mi::{Mi, MiCache};
use crate::splits::{compose_three_layer, unit_grid, Branch, LayerSplit, SenderSplit};

/// Per-input layer-order rate sums at receiver k: the bound on input i is the sum over
/// its layers Z in the order of I(Z; Y_k | layers preceding Z). Inputs without layers in
/// the order get `None` (no constraint).
pub fn lo_rates(mi: &Mi<'_>, k: usize, order: &LayerOrder) -> Vec<Option<f64>> {
    let n = mi.split().num_inputs();
    let mut known = vec![0u64; n];
    let mut sums = vec![None; n];
    let mut h_prev = mi.entropy(k, &known);
    for r in order.layers() {
        known[r.input] |= 1 << r.layer;
        let h = mi.entropy(k, &known);
        *sums[r.input].get_or_insert(0.0) += h_prev - h;
        h_prev = h;
    }
    sums
}

fn split_kl(mi: &Mi<'_>) -> Result<(usize, usize)> {
    let s = mi.split();
    if s.num_inputs() != 2 || mi.cache().channel().num_receivers() != 2 {
        return Err(Error::InvalidChannel("expected a two-user interference channel".into()));
    }
    Ok((s.input(0).num_layers(), s.input(1).num_layers()))
}

/// Rate bounds (R1, R2) of receiver k for a sliding-window order; missing bounds are
/// infinite.
pub fn swsc_bounds(mi: &Mi<'_>, d: &DecodingOrder) -> Result<(f64, f64)> {
    let (k, l) = split_kl(mi)?;
    let order = d.to_layer_order(k, l)?;
    let r = lo_rates(mi, d.receiver, &order);
    Ok((r[0].unwrap_or(f64::INFINITY), r[1].unwrap_or(f64::INFINITY)))
}

/// The SWSC rectangle for a split and a pair of decoding orders.
pub fn region_swsc(mi: &Mi<'_>, orders: &OrderPair) -> Result<RateRegion2> {
    let (a1, a2) = swsc_bounds(mi, &orders.d1)?;
    let (b1, b2) = swsc_bounds(mi, &orders.d2)?;
    Ok(RateRegion2::rect(orders.to_string(), a1.min(b1), a2.min(b2)))
}

/// Single-block rate splitting: each decoded part gets I(part; Y_k | earlier parts) at
/// every receiver that decodes it; the part rates are then projected onto (R1, R2).
pub fn region_rate_splitting(mi: &Mi<'_>, d1: &PartOrder, d2: &PartOrder) -> Result<RateRegion2> {
    let (k, l) = split_kl(mi)?;
    let sizes = [k, l];
    let index = |r: &crate::mi::LayerRef| if r.input == 0 { r.layer } else { k + r.layer };
    let mut sys = FmSystem::new((0..k + l).map(|i| usize::from(i >= k)).collect())?;
    for d in [d1, d2] {
        for r in &d.parts {
            if r.layer >= sizes[r.input] {
                return Err(Error::InvalidLayer { input: r.input, layer: r.layer });
            }
        }
        let own = d.receiver;
        if (0..sizes[own]).any(|j| !d.parts.contains(&crate::mi::LayerRef::new(own, j))) {
            return Err(Error::InfeasibleOrder(format!(
                "receiver {} must decode every part of its own message",
                own + 1
            )));
        }
        let mut known = [0u64; 2];
        for r in &d.parts {
            let mut t = [0u64; 2];
            t[r.input] = 1 << r.layer;
            sys.add(&[index(r)], mi.cond_mi(d.receiver, &t, &known))?;
            known[r.input] |= 1 << r.layer;
        }
    }
    Ok(fm_project(&sys, FmMode::Numeric)?.to_region("rs"))
}

/// Which families of 3-1 orders a union sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderFamily {
    /// Orders (15) or (16), chosen by the branch of the merged split.
    Prop2,
    /// All five families for every split.
    Thm2,
}

impl std::str::FromStr for OrderFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop2" => Ok(Self::Prop2),
            "thm2" => Ok(Self::Thm2),
            _ => Err(Error::Unknown { kind: "order family", name: s.to_string() }),
        }
    }
}

/// One rectangle of a union sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub alpha_prime: f64,
    pub alpha_dblprime: f64,
    pub family: Family31,
    pub r1: f64,
    pub r2: f64,
}

/// Sweeps merged three-layer splits of X (W unsplit) over a `grid` x `grid` lattice of
/// (alpha', alpha'') and the chosen order families. Results are in parameter order.
pub fn sweep_swsc_31(cache: &MiCache, family: OrderFamily, grid: usize) -> Result<Vec<SweepPoint>> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let ch = cache.channel();
    if ch.num_inputs() != 2 {
        return Err(Error::InvalidChannel("expected a two-user interference channel".into()));
    }
    let (px, pw) = (ch.input_pmf(0).clone(), ch.input_pmf(1).clone());
    let g = unit_grid(grid);
    let params: Vec<(f64, f64)> = g.iter().flat_map(|&a| g.iter().map(move |&b| (a, b))).collect();
    let chunks: Vec<Result<Vec<SweepPoint>>> = params
        .par_iter()
        .map(|&(ap, app)| {
            let three = compose_three_layer(&px, ap, app)?;
            let split = LayerSplit::new(vec![three.split, SenderSplit::trivial(pw.clone())]);
            let mi = Mi::new(cache, &split)?;
            let fams: Vec<Family31> = match family {
                OrderFamily::Prop2 => vec![match three.branch {
                    Branch::PrimeCoarse => Family31::Both,
                    Branch::DoublePrimeCoarse => Family31::BothSwapped,
                }],
                OrderFamily::Thm2 => Family31::ALL.to_vec(),
            };
            fams.into_iter()
                .map(|f| {
                    let (r1, r2) = region_swsc(&mi, &f.orders())?.conjunctions[0]
                        .as_rect()
                        .expect("swsc regions are rectangles");
                    Ok(SweepPoint { alpha_prime: ap, alpha_dblprime: app, family: f, r1, r2 })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

/// Union of SWSC rectangles over the sweep, pruned to its Pareto front.
pub fn region_swsc_union(cache: &MiCache, family: OrderFamily, grid: usize) -> Result<RateRegion2> {
    let pts = sweep_swsc_31(cache, family, grid)?;
    let mut r = RateRegion2::new(
        pts.iter()
            .map(|p| {
                Conjunction::rect(
                    format!("{}(a'={:.4},a''={:.4})", p.family.label(), p.alpha_prime, p.alpha_dblprime),
                    p.r1,
                    p.r2,
                )
            })
            .collect(),
    );
    r.prune_rectangles();
    Ok(r)
}

/// The split with X merged from two erasure parameters and W unsplit.
pub fn split_31(px: &Pmf, pw: &Pmf, alpha_prime: f64, alpha_dblprime: f64) -> Result<LayerSplit> {
    let three = compose_three_layer(px, alpha_prime, alpha_dblprime)?;
    Ok(LayerSplit::new(vec![three.split, SenderSplit::trivial(pw.clone())]))
}

/// Scales a region's rates by (1 - 1/b) to account for the first and last blocks of a
/// b-block frame carrying no new message.
pub fn with_block_loss(region: &RateRegion2, blocks: usize) -> RateRegion2 {
    let f = if blocks == 0 { 1.0 } else { 1.0 - 1.0 / blocks as f64 };
    let mut r = region.clone();
    for c in &mut r.conjunctions {
        for h in &mut c.constraints {
            h.c *= f;
        }
    }
    r
}
