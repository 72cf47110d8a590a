//! End-to-end SWSC link over the real Gaussian interference channel, and the
//! treat-interference-as-noise baseline on the same random draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::code::{CodeSpec, Codec, CRC_BITS};
use super::demap::{demap_llr, LayeredReceiver};
use super::schedule::{BlockSchedule, Slot};
use crate::channels::{discretize_gaussian, map_by_name, GaussianIc, SymbolMap, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::mi::{Mi, MiCache};
use crate::regions::{swsc_bounds, DecodingOrder, OrderPair};
use crate::splits::{LayerSplit, SenderSplit};

/// Interleaver seeds live apart from the per-trial streams.
const INTERLEAVER_SALT: u64 = 0x5357_5343_494c_5600;

/// What a receiver does after a CRC failure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorPolicy {
    /// Cancel the hard-decision re-encoding anyway and keep going.
    #[default]
    Continue,
    /// Stop decoding the stream; its later messages count as errors.
    Abort,
}

/// How the IAN baseline treats the interfering sender.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IanVariant {
    /// Average over the interfering constellation.
    Marginalize,
    /// Replace it by Gaussian noise of the same power.
    #[default]
    Gaussian,
}

/// Simulation settings; also the JSON config file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Symbols per block.
    pub n: usize,
    /// Blocks per frame.
    pub b: usize,
    /// (R1, R2) in bits per symbol.
    pub rates: [f64; 2],
    pub x_map: String,
    pub w_map: String,
    /// `d1=...;d2=...`; chosen from the theoretical bounds when absent.
    pub orders: Option<String>,
    pub snr_db: f64,
    pub inr_db: f64,
    pub code: CodeSpec,
    pub crc_bits: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub policy: ErrorPolicy,
    pub ian_variant: IanVariant,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 1024,
            b: 12,
            rates: [0.5, 0.5],
            x_map: "4pam_natural".into(),
            w_map: "bpsk".into(),
            orders: None,
            snr_db: 8.0,
            inr_db: 8.0,
            code: CodeSpec::default(),
            crc_bits: CRC_BITS,
            trials: 100,
            master_seed: 1,
            policy: ErrorPolicy::Continue,
            ian_variant: IanVariant::Gaussian,
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n < 128 {
            return bad(format!("n = {} is below 128", self.n));
        }
        if self.b < 3 {
            return bad(format!("b = {} is below 3", self.b));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.crc_bits != CRC_BITS {
            return bad(format!("only {CRC_BITS}-bit CRCs are supported"));
        }
        if self.rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad(format!("rates must be positive, got {:?}", self.rates));
        }
        if !(self.snr_db.is_finite() && !self.inr_db.is_nan()) {
            return bad("snr_db must be finite".into());
        }
        let link = Link::new(self)?;
        link.codecs(self)?;
        for s in 0..2 {
            if self.b < link.layers[s] {
                return bad(format!("b = {} is shorter than the {}-layer schedule", self.b, link.layers[s]));
            }
        }
        Ok(())
    }

    fn info_bits(&self, s: usize) -> usize {
        (self.rates[s] * self.n as f64).round() as usize
    }
}

/// Binary-layered real constellation of one sender.
#[derive(Clone, Debug)]
struct Sender {
    layers: usize,
    /// Output point per layer-bit tuple.
    points: Vec<f64>,
}

impl Sender {
    fn new(map: &SymbolMap) -> Result<Self> {
        if !map.is_real() || map.antennas() != 1 || map.layer_sizes().iter().any(|&s| s != 2) {
            return Err(Error::InvalidConfig(format!(
                "map `{}` must be a real single-antenna map over binary layers",
                map.name()
            )));
        }
        let pts = map.output_points();
        let points = map.table().iter().map(|&o| pts[o][0].re).collect();
        Ok(Self { layers: map.num_layers(), points })
    }
}

/// Channel and constellations of a config.
#[derive(Clone, Debug)]
struct Link {
    ic: GaussianIc,
    maps: [SymbolMap; 2],
    senders: [Sender; 2],
    layers: [usize; 2],
    /// Receiver over all layers (X layers, then W layers).
    rx: [LayeredReceiver; 2],
}

impl Link {
    fn new(cfg: &SimConfig) -> Result<Self> {
        let ic = GaussianIc::symmetric(cfg.snr_db, cfg.inr_db)?;
        let maps = [map_by_name(&cfg.x_map)?, map_by_name(&cfg.w_map)?];
        let senders = [Sender::new(&maps[0])?, Sender::new(&maps[1])?];
        let layers = [senders[0].layers, senders[1].layers];
        let rx = [0, 1].map(|k| {
            let (gx, gw) = ic.receiver_gains(k);
            let amp = ic.power.sqrt();
            let means = senders[0]
                .points
                .iter()
                .flat_map(|&x| senders[1].points.iter().map(move |&w| amp * (gx * x + gw * w)))
                .collect();
            LayeredReceiver::new(layers[0] + layers[1], means, 1.0)
        });
        Ok(Self { ic, maps, senders, layers, rx })
    }

    /// Receiver k seeing only sender s, with the other sender as Gaussian noise.
    fn gaussian_ian(&self, k: usize, s: usize) -> LayeredReceiver {
        let (gx, gw) = self.ic.receiver_gains(k);
        let (g, gi) = if s == 0 { (gx, gw) } else { (gw, gx) };
        let amp = self.ic.power.sqrt();
        let means = self.senders[s].points.iter().map(|&p| amp * g * p).collect();
        LayeredReceiver::new(self.layers[s], means, 1.0 + gi * gi * self.ic.power)
    }

    fn codecs(&self, cfg: &SimConfig) -> Result<[Codec; 2]> {
        let c = |s: usize| {
            Codec::new(&cfg.code, cfg.info_bits(s), self.layers[s] * cfg.n, cfg.master_seed ^ INTERLEAVER_SALT, s as u64)
        };
        Ok([c(0)?, c(1)?])
    }
}

/// Picks, per receiver, the candidate order with the largest rate margin at the target
/// rates under the theoretical sliding-window bounds.
pub fn auto_orders(cfg: &SimConfig) -> Result<OrderPair> {
    let link = Link::new(cfg)?;
    let ch = discretize_gaussian(&link.ic, &link.maps[0], &link.maps[1], DEFAULT_NODES)?;
    let cache = MiCache::new(ch);
    let split = LayerSplit::new(vec![
        SenderSplit::uniform_symbol_map(&link.maps[0])?,
        SenderSplit::uniform_symbol_map(&link.maps[1])?,
    ]);
    let mi = Mi::new(&cache, &split)?;
    let rates = [cfg.info_bits(0) as f64 / cfg.n as f64, cfg.info_bits(1) as f64 / cfg.n as f64];
    let pick = |k: usize| -> Result<DecodingOrder> {
        let mut best: Option<(f64, DecodingOrder)> = None;
        for d in DecodingOrder::candidates(k, link.layers[0], link.layers[1]) {
            let (b1, b2) = swsc_bounds(&mi, &d)?;
            let margin = (b1 - rates[0]).min(b2 - rates[1]);
            if best.as_ref().is_none_or(|(m, _)| margin > *m + 1e-12) {
                best = Some((margin, d));
            }
        }
        Ok(best.expect("candidate list is never empty").1)
    };
    Ok(OrderPair { d1: pick(0)?, d2: pick(1)? })
}

/// Messages and noise of one trial, shared by every scheme.
#[derive(Clone, Debug)]
struct Draws {
    /// `msgs[s][j]`: payload of message j + 1 of stream s.
    msgs: [Vec<Vec<u8>>; 2],
    /// `noise[k][t]`: noise of receiver k in block t.
    noise: [Vec<Vec<f64>>; 2],
}

impl Draws {
    fn new(cfg: &SimConfig, trial: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
        rng.set_stream(trial as u64 + 1);
        let msgs = [0, 1].map(|s| {
            (0..cfg.b).map(|_| (0..cfg.info_bits(s)).map(|_| rng.random_range(0..2u8)).collect()).collect()
        });
        let noise = [0, 1].map(|_| {
            (0..cfg.b).map(|_| (0..cfg.n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect()
        });
        Self { msgs, noise }
    }
}

/// `bits[s][t][i]`: layer i of sender s in block t.
type LayerBits = [Vec<Vec<Vec<u8>>>; 2];

fn receive(link: &Link, bits: &LayerBits, draws: &Draws, k: usize, n: usize) -> Vec<Vec<f64>> {
    let rx = &link.rx[k];
    (0..bits[0].len())
        .map(|t| {
            let all: Vec<&[u8]> = bits[0][t].iter().chain(&bits[1][t]).map(Vec::as_slice).collect();
            (0..n).map(|j| rx.mean(&all, j) + draws.noise[k][t][j]).collect()
        })
        .collect()
}

/// Splits an interleaved codeword into its n-bit segments.
fn segments(cw: &[u8], n: usize) -> Vec<Vec<u8>> {
    cw.chunks(n).map(<[u8]>::to_vec).collect()
}

/// Layer bits of the block-Markov SWSC transmission.
fn swsc_layers(cfg: &SimConfig, sched: &[BlockSchedule; 2], codecs: &[Codec; 2], draws: &Draws) -> LayerBits {
    [0, 1].map(|s| {
        let pad = segments(&codecs[s].encode(&vec![0; codecs[s].info_bits]), cfg.n);
        let cws: Vec<Vec<Vec<u8>>> = (0..sched[s].messages())
            .map(|j| segments(&codecs[s].encode(&draws.msgs[s][j]), cfg.n))
            .collect();
        (0..cfg.b)
            .map(|t| {
                (0..sched[s].layers)
                    .map(|i| {
                        let seg = sched[s].layers - 1 - i;
                        match sched[s].slots[t][i] {
                            Slot::Pad => pad[seg].clone(),
                            Slot::Message(m) => cws[m - 1][seg].clone(),
                        }
                    })
                    .collect()
            })
            .collect()
    })
}

/// Per-message outcome of one stream at its intended receiver.
#[derive(Clone, Debug, Default)]
struct StreamOutcome {
    errors: Vec<bool>,
    crc_failures: Vec<bool>,
}

/// Sliding-window successive cancellation at receiver k.
fn swsc_decode(
    cfg: &SimConfig,
    link: &Link,
    sched: &[BlockSchedule; 2],
    codecs: &[Codec; 2],
    order: &DecodingOrder,
    y: &[Vec<f64>],
    draws: &Draws,
) -> StreamOutcome {
    let n = cfg.n;
    // known[s][t][i]
    let mut known: [Vec<Vec<Option<Vec<u8>>>>; 2] = [0, 1].map(|s| {
        let pad = segments(&codecs[s].encode(&vec![0; codecs[s].info_bits]), n);
        (0..cfg.b)
            .map(|t| {
                (0..sched[s].layers)
                    .map(|i| (sched[s].slots[t][i] == Slot::Pad).then(|| pad[sched[s].layers - 1 - i].clone()))
                    .collect()
            })
            .collect()
    });
    let k = order.receiver;
    let mut result: [Vec<Option<(Vec<u8>, bool)>>; 2] = [0, 1].map(|s| vec![None; sched[s].messages()]);
    let mut aborted = [false; 2];
    let reach = order.steps.iter().map(|s| -s.lag).max().unwrap_or(0).max(0) as usize;
    for j in 1..=cfg.b + reach {
        for step in &order.steps {
            let s = step.stream;
            let m = j as i64 + step.lag as i64;
            if m < 1 || m > sched[s].messages() as i64 || aborted[s] {
                continue;
            }
            let m = m as usize;
            let mut llr = Vec::with_capacity(sched[s].layers * n);
            for (t, i) in sched[s].message_slots(m) {
                let ks: Vec<Option<&[u8]>> =
                    known[0][t].iter().chain(&known[1][t]).map(|b| b.as_deref()).collect();
                let target = if s == 0 { i } else { link.layers[0] + i };
                llr.extend(demap_llr(&link.rx[k], &y[t], &ks, target));
            }
            let (payload, ok) = codecs[s].decode(&llr);
            if ok || cfg.policy == ErrorPolicy::Continue {
                let segs = segments(&codecs[s].encode(&payload), n);
                for (seg, (t, i)) in sched[s].message_slots(m).into_iter().enumerate() {
                    known[s][t][i] = Some(segs[seg].clone());
                }
            } else {
                aborted[s] = true;
            }
            result[s][m - 1] = Some((payload, ok));
        }
    }
    let own = &result[k];
    StreamOutcome {
        errors: own
            .iter()
            .enumerate()
            .map(|(j, r)| r.as_ref().is_none_or(|(p, _)| *p != draws.msgs[k][j]))
            .collect(),
        crc_failures: own.iter().map(|r| r.as_ref().is_none_or(|(_, ok)| !ok)).collect(),
    }
}

/// Single-block decoding of stream k at receiver k treating the other sender as noise.
fn ian_decode(cfg: &SimConfig, link: &Link, codecs: &[Codec; 2], y: &[Vec<f64>], draws: &Draws, k: usize) -> StreamOutcome {
    let layers = link.layers[k];
    let (rx, offset, total) = match cfg.ian_variant {
        IanVariant::Marginalize => (link.rx[k].clone(), if k == 0 { 0 } else { link.layers[0] }, link.rx[k].layers),
        IanVariant::Gaussian => (link.gaussian_ian(k, k), 0, layers),
    };
    let mut out = StreamOutcome::default();
    let none = vec![None; total];
    for t in 0..cfg.b {
        // Segment s sits on layer K - 1 - s of the same block.
        let llr: Vec<f64> =
            (0..layers).flat_map(|seg| demap_llr(&rx, &y[t], &none, offset + layers - 1 - seg)).collect();
        let (payload, ok) = codecs[k].decode(&llr);
        out.errors.push(payload != draws.msgs[k][t]);
        out.crc_failures.push(!ok);
    }
    out
}

fn ian_layers(cfg: &SimConfig, link: &Link, codecs: &[Codec; 2], draws: &Draws) -> LayerBits {
    [0, 1].map(|s| {
        (0..cfg.b)
            .map(|t| {
                let segs = segments(&codecs[s].encode(&draws.msgs[s][t]), cfg.n);
                (0..link.layers[s]).map(|i| segs[link.layers[s] - 1 - i].clone()).collect()
            })
            .collect()
    })
}

/// Block-error statistics of one stream.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StreamReport {
    pub messages: u64,
    pub errors: u64,
    pub crc_failures: u64,
    pub bler: f64,
    pub nominal_rate: f64,
    /// Nominal rate times the fraction of blocks that carry real messages.
    pub effective_rate: f64,
    /// Errors per message index over all trials (error propagation trace).
    pub errors_by_message: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlerReport {
    pub scheme: String,
    pub orders: Option<String>,
    pub trials: usize,
    pub streams: [StreamReport; 2],
}

impl BlerReport {
    fn collect(scheme: &str, orders: Option<String>, cfg: &SimConfig, factor: [f64; 2], per_trial: &[[StreamOutcome; 2]]) -> Self {
        let streams = [0, 1].map(|s| {
            let len = per_trial.first().map_or(0, |t| t[s].errors.len());
            let mut by = vec![0u64; len];
            let mut crc = 0;
            for t in per_trial {
                for (j, &e) in t[s].errors.iter().enumerate() {
                    by[j] += e as u64;
                }
                crc += t[s].crc_failures.iter().filter(|&&f| f).count() as u64;
            }
            let messages = (len * per_trial.len()) as u64;
            let errors = by.iter().sum();
            let nominal = cfg.info_bits(s) as f64 / cfg.n as f64;
            StreamReport {
                messages,
                errors,
                crc_failures: crc,
                bler: if messages == 0 { 0.0 } else { errors as f64 / messages as f64 },
                nominal_rate: nominal,
                effective_rate: nominal * factor[s],
                errors_by_message: by,
            }
        });
        Self { scheme: scheme.into(), orders, trials: cfg.trials, streams }
    }

    /// Both streams below the threshold.
    pub fn achieves(&self, threshold: f64) -> bool {
        self.streams.iter().all(|s| s.bler < threshold)
    }
}

/// SWSC and IAN reports computed on the same draws.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub swsc: BlerReport,
    pub ian: BlerReport,
}

/// Runs every trial of both schemes. Trial t draws from stream t + 1 of the master seed,
/// so the result does not depend on scheduling.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let link = Link::new(cfg)?;
    let codecs = link.codecs(cfg)?;
    let sched = [BlockSchedule::new(link.layers[0], cfg.b)?, BlockSchedule::new(link.layers[1], cfg.b)?];
    let orders: OrderPair = match &cfg.orders {
        Some(text) => text.parse()?,
        None => auto_orders(cfg)?,
    };
    for d in [&orders.d1, &orders.d2] {
        d.check_feasible(link.layers[0], link.layers[1])?;
    }
    let outcomes: Vec<([StreamOutcome; 2], [StreamOutcome; 2])> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let draws = Draws::new(cfg, trial);
            let tx = swsc_layers(cfg, &sched, &codecs, &draws);
            let swsc = [&orders.d1, &orders.d2].map(|d| {
                let y = receive(&link, &tx, &draws, d.receiver, cfg.n);
                swsc_decode(cfg, &link, &sched, &codecs, d, &y, &draws)
            });
            let tx = ian_layers(cfg, &link, &codecs, &draws);
            let ian = [0, 1].map(|k| {
                let y = receive(&link, &tx, &draws, k, cfg.n);
                ian_decode(cfg, &link, &codecs, &y, &draws, k)
            });
            (swsc, ian)
        })
        .collect();
    let (sw, ia): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let factor = [sched[0].rate_factor(), sched[1].rate_factor()];
    Ok(SimResult {
        swsc: BlerReport::collect("swsc", Some(orders.to_string()), cfg, factor, &sw),
        ian: BlerReport::collect("ian", None, cfg, [1.0, 1.0], &ia),
    })
}

/// The SWSC block schedules (sender 1, sender 2) of a config.
pub fn schedules(cfg: &SimConfig) -> Result<[BlockSchedule; 2]> {
    let link = Link::new(cfg)?;
    Ok([BlockSchedule::new(link.layers[0], cfg.b)?, BlockSchedule::new(link.layers[1], cfg.b)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig { n: 128, b: 4, trials: 2, rates: [0.5, 0.5], ..Default::default() }
    }

    #[test]
    fn noiseless_link_is_error_free() {
        let cfg = SimConfig { snr_db: 60.0, inr_db: 60.0, orders: Some("d1=m1@-1>m2@0;d2=m1@-1>m2@-1".into()), ..small() };
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.swsc.streams[0].errors, 0);
        assert_eq!(r.swsc.streams[1].errors, 0);
        assert_eq!(r.swsc.streams[0].messages, 2 * 3);
        assert!((r.swsc.streams[0].effective_rate - 0.5 * 3.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = SimConfig { snr_db: 4.0, inr_db: 4.0, ..small() };
        assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(SimConfig { n: 64, ..small() }.validate().is_err());
        assert!(SimConfig { b: 2, ..small() }.validate().is_err());
        assert!(SimConfig { x_map: "qpsk".into(), ..small() }.validate().is_err());
        assert!(matches!(SimConfig { rates: [2.5, 0.5], ..small() }.validate(), Err(Error::RateTooHigh { .. })));
        let bad = SimConfig { orders: Some("d1=m1@0;d2=m2@0".into()), ..small() };
        assert!(matches!(simulate(&bad), Err(Error::InfeasibleOrder(_))));
    }
}
