//! Single-letter regions of the two-user interference channel: IAN, SCD, SD and SND.

use super::region2::{Conjunction, HalfPlane, RateRegion2};
use crate::channels::JointChannel;
use crate::error::{Error, Result};
use crate::mi::{Mi, MiCache};
use crate::splits::LayerSplit;

/// Mutual informations seen by one receiver, with "own" the desired input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceiverInfo {
    /// I(own; Y)
    pub own: f64,
    /// I(other; Y)
    pub other: f64,
    /// I(own; Y | other)
    pub own_given: f64,
    /// I(other; Y | own)
    pub other_given: f64,
    /// I(own, other; Y)
    pub both: f64,
}

/// The ten mutual informations that define every unsplit region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IcInfo {
    pub rx: [ReceiverInfo; 2],
}

impl IcInfo {
    /// Evaluates the information quantities of a two-input, two-receiver channel.
    pub fn new(cache: &MiCache) -> Result<Self> {
        let ch = cache.channel();
        if ch.num_inputs() != 2 || ch.num_receivers() != 2 {
            return Err(Error::InvalidChannel("expected two inputs and two receivers".into()));
        }
        let split = LayerSplit::trivial(&[ch.input_pmf(0).clone(), ch.input_pmf(1).clone()]);
        let mi = Mi::new(cache, &split)?;
        let rx = [0, 1].map(|k| {
            let (o, t) = if k == 0 { ([1, 0], [0, 1]) } else { ([0, 1], [1, 0]) };
            ReceiverInfo {
                own: mi.cond_mi(k, &o, &[0, 0]),
                other: mi.cond_mi(k, &t, &[0, 0]),
                own_given: mi.cond_mi(k, &o, &t),
                other_given: mi.cond_mi(k, &t, &o),
                both: mi.cond_mi(k, &[1, 1], &[0, 0]),
            }
        });
        Ok(Self { rx })
    }

    pub fn from_channel(channel: &JointChannel) -> Result<Self> {
        Self::new(&MiCache::new(channel.clone()))
    }

    /// (R1 bound, R2 bound) as seen by receiver k, given (bound on own, bound on other).
    fn oriented(k: usize, own: f64, other: f64) -> (f64, f64) {
        if k == 0 {
            (own, other)
        } else {
            (other, own)
        }
    }

    fn rect(k: usize, label: &str, own: f64, other: f64) -> Conjunction {
        let (a, b) = Self::oriented(k, own, other);
        Conjunction::rect(label, a, b)
    }

    /// Receiver k decodes its own message treating the other as noise.
    pub fn ian_k(&self, k: usize) -> RateRegion2 {
        RateRegion2::single(Self::rect(k, &format!("ian{}", k + 1), self.rx[k].own, f64::INFINITY))
    }

    /// Receiver k decodes the interfering message first, then its own.
    pub fn scd_k(&self, k: usize) -> RateRegion2 {
        let r = &self.rx[k];
        RateRegion2::single(Self::rect(k, &format!("scd{}", k + 1), r.own_given, r.other))
    }

    /// The pentagon of receiver k decoding both messages uniquely.
    pub fn sd(&self, k: usize) -> RateRegion2 {
        let r = &self.rx[k];
        let (a, b) = Self::oriented(k, r.own_given, r.other_given);
        RateRegion2::single(Conjunction::new(
            format!("sd{}", k + 1),
            vec![HalfPlane::r1(a), HalfPlane::r2(b), HalfPlane::sum(r.both)],
        ))
    }

    /// IAN or nonunique simultaneous decoding at receiver k.
    pub fn snd_k(&self, k: usize) -> RateRegion2 {
        let r = &self.rx[k];
        let (a, b) = Self::oriented(k, r.own_given, f64::INFINITY);
        let mut nonunique = vec![HalfPlane::sum(r.both)];
        if a.is_finite() {
            nonunique.push(HalfPlane::r1(a));
        }
        if b.is_finite() {
            nonunique.push(HalfPlane::r2(b));
        }
        self.ian_k(k)
            .union(&RateRegion2::single(Conjunction::new(format!("snd{}", k + 1), nonunique)))
    }

    pub fn ian(&self) -> RateRegion2 {
        RateRegion2::rect("ian", self.rx[0].own, self.rx[1].own)
    }

    pub fn scd(&self) -> RateRegion2 {
        self.scd_k(0).intersect(&self.scd_k(1))
    }

    /// Each receiver picks IAN or SCD.
    pub fn mix_and_match(&self) -> RateRegion2 {
        self.ian_k(0).union(&self.scd_k(0)).intersect(&self.ian_k(1).union(&self.scd_k(1)))
    }

    pub fn snd(&self) -> RateRegion2 {
        self.snd_k(0).intersect(&self.snd_k(1))
    }

    /// (IAN_1 u SD_1) n (IAN_2 u SD_2).
    pub fn snd_decomposed(&self) -> RateRegion2 {
        self.ian_k(0).union(&self.sd(0)).intersect(&self.ian_k(1).union(&self.sd(1)))
    }
}

pub fn region_ian(channel: &JointChannel) -> Result<RateRegion2> {
    Ok(IcInfo::from_channel(channel)?.ian())
}

pub fn region_scd(channel: &JointChannel) -> Result<RateRegion2> {
    Ok(IcInfo::from_channel(channel)?.scd())
}

pub fn region_snd(channel: &JointChannel) -> Result<RateRegion2> {
    Ok(IcInfo::from_channel(channel)?.snd())
}

pub fn region_sd(channel: &JointChannel, receiver: usize) -> Result<RateRegion2> {
    if receiver > 1 {
        return Err(Error::InvalidParameter(format!("receiver {receiver} does not exist")));
    }
    Ok(IcInfo::from_channel(channel)?.sd(receiver))
}
