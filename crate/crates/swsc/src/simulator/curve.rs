//! Symmetric-rate curves over INR: theoretical rates of IAN, SWCM and SND, and the
//! largest simulated rates that meet the BLER target.

use std::fmt::Write;

use serde::Serialize;

use super::link::{simulate, SimConfig};
use crate::channels::{discretize_gaussian, map_by_name, GaussianIc, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::mi::{Mi, MiCache};
use crate::regions::{region_swsc, IcInfo, OrderPair};
use crate::splits::{LayerSplit, SenderSplit};

/// A rate pair counts as achieved when both streams have BLER below this.
pub const BLER_TARGET: f64 = 0.1;

/// Theoretical symmetric rates (R1 = R2) at one channel point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoryPoint {
    pub inr_db: f64,
    /// Interference replaced by Gaussian noise of the same power.
    pub ian_gaussian: f64,
    /// Interfering constellation averaged out.
    pub ian_marginal: f64,
    /// Best sliding-window order pair over the fixed layered maps.
    pub swcm: f64,
    pub swcm_orders: String,
    pub snd: f64,
}

fn db(v: f64) -> f64 {
    10.0 * v.log10()
}

pub fn theory_point(snr_db: f64, inr_db: f64, x_map: &str, w_map: &str) -> Result<TheoryPoint> {
    let maps = [map_by_name(x_map)?, map_by_name(w_map)?];
    let ic = GaussianIc::symmetric(snr_db, inr_db)?;
    let cache = MiCache::new(discretize_gaussian(&ic, &maps[0], &maps[1], DEFAULT_NODES)?);
    let info = IcInfo::new(&cache)?;

    // Gaussian interference: each receiver sees its own signal at SNR S / (1 + I).
    let eff = [db(ic.s1() / (1.0 + ic.i1())), db(ic.s2() / (1.0 + ic.i2()))];
    let clean = GaussianIc::from_db(eff[0], f64::NEG_INFINITY, eff[1], f64::NEG_INFINITY, 0.0)?;
    let clean = IcInfo::new(&MiCache::new(discretize_gaussian(&clean, &maps[0], &maps[1], DEFAULT_NODES)?))?;
    let ian_gaussian = clean.rx[0].own.min(clean.rx[1].own);

    let split = LayerSplit::new(vec![
        SenderSplit::uniform_symbol_map(&maps[0])?,
        SenderSplit::uniform_symbol_map(&maps[1])?,
    ]);
    let mi = Mi::new(&cache, &split)?;
    let (k, l) = (maps[0].num_layers(), maps[1].num_layers());
    let mut swcm = (0.0, String::new());
    for pair in OrderPair::candidates(k, l) {
        let r = region_swsc(&mi, &pair)?.max_symmetric();
        if r > swcm.0 + 1e-12 {
            swcm = (r, pair.to_string());
        }
    }
    Ok(TheoryPoint {
        inr_db,
        ian_gaussian,
        ian_marginal: info.ian().max_symmetric(),
        swcm: swcm.0,
        swcm_orders: swcm.1,
        snd: info.snd().max_symmetric(),
    })
}

/// One simulated (INR, rate, scheme) point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRow {
    pub inr_db: f64,
    pub rate_bits: f64,
    pub bler_stream1: f64,
    pub bler_stream2: f64,
    pub scheme: String,
}

impl SimRow {
    pub fn csv(rows: &[SimRow]) -> String {
        let mut s = String::from("inr_db,rate_bits,bler_stream1,bler_stream2,scheme\n");
        for r in rows {
            writeln!(s, "{},{},{},{},{}", r.inr_db, r.rate_bits, r.bler_stream1, r.bler_stream2, r.scheme).unwrap();
        }
        s
    }
}

/// Largest simulated symmetric rates meeting the BLER target at one INR.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub inr_db: f64,
    pub swsc_rate: Option<f64>,
    pub ian_rate: Option<f64>,
    pub swsc_orders: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    pub snr_db: f64,
    pub theory: Vec<TheoryPoint>,
    pub simulated: Vec<CurvePoint>,
    pub rows: Vec<SimRow>,
}

/// Theoretical curves at every INR and, for each rate in `rates` (may be empty), a
/// simulation of both schemes at the symmetric pair (rate, rate).
pub fn sweep_curve(base: &SimConfig, inr_db: &[f64], rates: &[f64]) -> Result<CurveReport> {
    if inr_db.is_empty() {
        return Err(Error::InvalidConfig("the INR list is empty".into()));
    }
    let mut theory = Vec::new();
    let mut simulated = Vec::new();
    let mut rows = Vec::new();
    for &inr in inr_db {
        theory.push(theory_point(base.snr_db, inr, &base.x_map, &base.w_map)?);
        let mut point = CurvePoint { inr_db: inr, swsc_rate: None, ian_rate: None, swsc_orders: Vec::new() };
        for &r in rates {
            let cfg = SimConfig { inr_db: inr, rates: [r, r], ..base.clone() };
            let res = simulate(&cfg)?;
            for rep in [&res.swsc, &res.ian] {
                rows.push(SimRow {
                    inr_db: inr,
                    rate_bits: r,
                    bler_stream1: rep.streams[0].bler,
                    bler_stream2: rep.streams[1].bler,
                    scheme: rep.scheme.clone(),
                });
            }
            if res.swsc.achieves(BLER_TARGET) && point.swsc_rate.is_none_or(|v| r > v) {
                point.swsc_rate = Some(r);
            }
            if res.ian.achieves(BLER_TARGET) && point.ian_rate.is_none_or(|v| r > v) {
                point.ian_rate = Some(r);
            }
            point.swsc_orders.extend(res.swsc.orders);
        }
        simulated.push(point);
    }
    Ok(CurveReport { snr_db: base.snr_db, theory, simulated, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_ordering_at_8db() {
        let p = theory_point(8.0, 8.0, "4pam_natural", "bpsk").unwrap();
        assert!(p.ian_gaussian <= p.ian_marginal + 1e-9, "{p:?}");
        assert!(p.ian_marginal <= p.swcm + 1e-9, "{p:?}");
        assert!(p.swcm <= p.snd + 1e-9, "{p:?}");
    }

    #[test]
    fn no_interference_collapses_swcm_to_ian() {
        let p = theory_point(8.0, f64::NEG_INFINITY, "4pam_natural", "bpsk").unwrap();
        assert!((p.swcm - p.ian_gaussian).abs() < 1e-6, "{p:?}");
    }
}
