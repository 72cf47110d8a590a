//! Decoding orders, layer orders and their text grammar.
//!
//! A sliding-window decoding order lists which message blocks a receiver recovers while
//! processing block j, e.g. `m1@-2>m2@0` (first m1(j-2), then m2(j)). A rate-splitting
//! order lists message parts for a single block, e.g. `m1.1>m2>m1.2`. A pair of orders
//! is written `d1=...;d2=...`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mi::LayerRef;

/// One decoding step: message stream (0 for m1, 1 for m2) at a block lag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub stream: usize,
    pub lag: i32,
}

/// Sliding-window decoding order of one receiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingOrder {
    pub receiver: usize,
    pub steps: Vec<Step>,
}

fn parse_stream(s: &str, text: &str) -> Result<usize> {
    match s.trim() {
        "m1" => Ok(0),
        "m2" => Ok(1),
        _ => Err(Error::OrderSyntax(text.to_string())),
    }
}

impl DecodingOrder {
    /// Parses `m1@-2>m2@0` for the given receiver (0 or 1). A missing lag means 0.
    pub fn parse(receiver: usize, text: &str) -> Result<Self> {
        let syntax = || Error::OrderSyntax(text.to_string());
        if receiver > 1 {
            return Err(syntax());
        }
        let mut steps = Vec::new();
        for part in text.split('>') {
            let (name, lag) = match part.split_once('@') {
                Some((n, l)) => (n, l.trim().parse::<i32>().map_err(|_| syntax())?),
                None => (part, 0),
            };
            steps.push(Step { stream: parse_stream(name, text)?, lag });
        }
        if steps.len() > 2 || (steps.len() == 2 && steps[0].stream == steps[1].stream) {
            return Err(syntax());
        }
        let order = Self { receiver, steps };
        if order.step(receiver).is_none() {
            return Err(Error::InfeasibleOrder(format!(
                "receiver {} never decodes its own message in `{text}`",
                receiver + 1
            )));
        }
        Ok(order)
    }

    fn step(&self, stream: usize) -> Option<Step> {
        self.steps.iter().copied().find(|s| s.stream == stream)
    }

    /// Checks the decoding window of a K-L split: m1(j+lag) is complete only when its
    /// last layer has been sent, so lag <= 1 - K (and lag <= 1 - L for m2).
    pub fn check_feasible(&self, k: usize, l: usize) -> Result<()> {
        for s in &self.steps {
            let layers = if s.stream == 0 { k } else { l };
            if s.lag > 1 - layers as i32 {
                return Err(Error::InfeasibleOrder(format!(
                    "{self}: m{}@{} is not yet fully received with {layers} layers",
                    s.stream + 1,
                    s.lag
                )));
            }
        }
        Ok(())
    }

    /// The layer order this decoding order induces for a K-L split. Layers of a sender
    /// that is not decoded are noise and do not appear.
    pub fn to_layer_order(&self, k: usize, l: usize) -> Result<LayerOrder> {
        self.check_feasible(k, l)?;
        let xs = (0..k).map(|i| (2 * (i as i64 + 1) - 2 * k as i64, LayerRef::new(0, i)));
        let seq: Vec<LayerRef> = match (self.step(0), self.step(1)) {
            (Some(_), None) => xs.map(|(_, r)| r).collect(),
            (None, Some(_)) => (0..l).map(|j| LayerRef::new(1, j)).collect(),
            (Some(a), Some(b)) => {
                // Offset between the two streams measured in half-blocks.
                let delta = if self.steps[0].stream == 0 {
                    b.lag as i64 - a.lag as i64
                } else {
                    b.lag as i64 - a.lag as i64 + 1
                };
                let ws = (0..l).map(|j| {
                    (2 * (j as i64 + 1) - 2 * l as i64 - 2 * delta + 1, LayerRef::new(1, j))
                });
                let mut all: Vec<(i64, LayerRef)> = xs.chain(ws).collect();
                all.sort_by_key(|&(p, _)| p);
                all.into_iter().map(|(_, r)| r).collect()
            }
            (None, None) => unreachable!("parse rejects empty orders"),
        };
        LayerOrder::new(seq)
    }
}

impl DecodingOrder {
    /// Feasible orders of receiver `receiver` for a K-L split: its own message alone, or
    /// both messages in either sequence, with each lag at its earliest feasible value or
    /// one block later.
    pub fn candidates(receiver: usize, k: usize, l: usize) -> Vec<DecodingOrder> {
        let layers = [k, l];
        let lags = |s: usize| [1 - layers[s] as i32, -(layers[s] as i32)];
        let (own, other) = (receiver, 1 - receiver);
        let mut out = Vec::new();
        for a in lags(own) {
            out.push(Self { receiver, steps: vec![Step { stream: own, lag: a }] });
            for b in lags(other) {
                let (x, y) = (Step { stream: own, lag: a }, Step { stream: other, lag: b });
                out.push(Self { receiver, steps: vec![x, y] });
                out.push(Self { receiver, steps: vec![y, x] });
            }
        }
        out
    }
}

impl fmt::Display for DecodingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> =
            self.steps.iter().map(|s| format!("m{}@{}", s.stream + 1, s.lag)).collect();
        write!(f, "{}", s.join(">"))
    }
}

/// Parses `d1=...;d2=...` into a pair of orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderPair {
    pub d1: DecodingOrder,
    pub d2: DecodingOrder,
}

impl FromStr for OrderPair {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (d1, d2) = parse_pair(text)?;
        Ok(Self { d1: DecodingOrder::parse(0, d1)?, d2: DecodingOrder::parse(1, d2)? })
    }
}

impl OrderPair {
    /// Every pair of candidate orders for a K-L split.
    pub fn candidates(k: usize, l: usize) -> Vec<OrderPair> {
        let d2s = DecodingOrder::candidates(1, k, l);
        DecodingOrder::candidates(0, k, l)
            .into_iter()
            .flat_map(|d1| d2s.iter().map(move |d2| OrderPair { d1: d1.clone(), d2: d2.clone() }))
            .collect()
    }
}

impl fmt::Display for OrderPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d1={};d2={}", self.d1, self.d2)
    }
}

fn parse_pair(text: &str) -> Result<(&str, &str)> {
    let syntax = || Error::OrderSyntax(text.to_string());
    let (a, b) = text.split_once(';').ok_or_else(syntax)?;
    let d1 = a.trim().strip_prefix("d1=").ok_or_else(syntax)?;
    let d2 = b.trim().strip_prefix("d2=").ok_or_else(syntax)?;
    Ok((d1, d2))
}

/// The sliding-window order families used by the 3-1 split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family31 {
    /// d1: m1(j-2) then m2(j); d2: m1(j-2) then m2(j-1).
    Both,
    /// The two receivers of `Both` swapped.
    BothSwapped,
    /// Each receiver decodes only its own message.
    Ian,
    /// Receiver 1 decodes both, receiver 2 only m2.
    FirstDecodesBoth,
    /// Receiver 1 only m1, receiver 2 decodes both.
    SecondDecodesBoth,
}

impl Family31 {
    pub const ALL: [Family31; 5] = [
        Family31::Both,
        Family31::BothSwapped,
        Family31::Ian,
        Family31::FirstDecodesBoth,
        Family31::SecondDecodesBoth,
    ];

    pub fn text(self) -> &'static str {
        match self {
            Family31::Both => "d1=m1@-2>m2@0;d2=m1@-2>m2@-1",
            Family31::BothSwapped => "d1=m1@-2>m2@-1;d2=m1@-2>m2@0",
            Family31::Ian => "d1=m1@-2;d2=m2@0",
            Family31::FirstDecodesBoth => "d1=m1@-2>m2@0;d2=m2@0",
            Family31::SecondDecodesBoth => "d1=m1@-2;d2=m1@-2>m2@0",
        }
    }

    pub fn orders(self) -> OrderPair {
        self.text().parse().expect("built-in orders parse")
    }

    pub fn label(self) -> &'static str {
        match self {
            Family31::Both => "o15",
            Family31::BothSwapped => "o16",
            Family31::Ian => "o17",
            Family31::FirstDecodesBoth => "o18",
            Family31::SecondDecodesBoth => "o19",
        }
    }
}

/// A sequence of layers in which each input's layers keep their natural order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerOrder {
    seq: Vec<LayerRef>,
    alternating: bool,
}

impl LayerOrder {
    /// Rejects repeated layers and layers of one input that appear out of order.
    pub fn new(seq: Vec<LayerRef>) -> Result<Self> {
        let inputs = seq.iter().map(|r| r.input + 1).max().unwrap_or(0);
        let mut next = vec![0usize; inputs];
        for r in &seq {
            if r.layer != next[r.input] {
                return Err(Error::InvalidLayer { input: r.input, layer: r.layer });
            }
            next[r.input] += 1;
        }
        let switches = seq.windows(2).filter(|w| w[0].input != w[1].input).count();
        let present = next.iter().filter(|&&n| n > 0).count();
        Ok(Self { alternating: switches + 1 > present, seq })
    }

    pub fn layers(&self) -> &[LayerRef] {
        &self.seq
    }

    /// True when some input's layers are interleaved with another input's.
    pub fn is_alternating(&self) -> bool {
        self.alternating
    }

    /// Number of layers of `input` in the order.
    pub fn count(&self, input: usize) -> usize {
        self.seq.iter().filter(|r| r.input == input).count()
    }
}

impl fmt::Display for LayerOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self
            .seq
            .iter()
            .map(|r| format!("{}{}", ["X", "W", "U", "V"].get(r.input).unwrap_or(&"Z"), r.layer + 1))
            .collect();
        write!(f, "{}", names.join(">"))
    }
}

/// Single-block successive-cancellation order over message parts, e.g. `m1.1>m2>m1.2`.
/// `m1` alone is part 1 of m1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartOrder {
    pub receiver: usize,
    pub parts: Vec<LayerRef>,
}

impl PartOrder {
    pub fn parse(receiver: usize, text: &str) -> Result<Self> {
        let syntax = || Error::OrderSyntax(text.to_string());
        let mut parts = Vec::new();
        for p in text.split('>') {
            let (name, idx) = match p.split_once('.') {
                Some((n, i)) => (n, i.trim().parse::<usize>().map_err(|_| syntax())?),
                None => (p, 1),
            };
            if idx == 0 {
                return Err(syntax());
            }
            parts.push(LayerRef::new(parse_stream(name, text)?, idx - 1));
        }
        if (1..parts.len()).any(|i| parts[..i].contains(&parts[i])) {
            return Err(syntax());
        }
        Ok(Self { receiver, parts })
    }

    /// Parses `d1=...;d2=...`.
    pub fn parse_pair(text: &str) -> Result<(Self, Self)> {
        let (a, b) = parse_pair(text)?;
        Ok((Self::parse(0, a)?, Self::parse(1, b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lo(text: &str, rx: usize, k: usize, l: usize) -> String {
        DecodingOrder::parse(rx, text).unwrap().to_layer_order(k, l).unwrap().to_string()
    }

    #[test]
    fn two_one_orders() {
        assert_eq!(lo("m1@-1>m2@0", 0, 2, 1), "X1>W1>X2");
        assert_eq!(lo("m1@-1>m2@-1", 1, 2, 1), "X1>X2>W1");
    }

    #[test]
    fn three_one_orders() {
        assert_eq!(lo("m1@-2>m2@0", 0, 3, 1), "X1>W1>X2>X3");
        assert_eq!(lo("m1@-2>m2@-1", 1, 3, 1), "X1>X2>W1>X3");
        assert_eq!(lo("m1@-2", 0, 3, 1), "X1>X2>X3");
        assert_eq!(lo("m2@0", 1, 3, 1), "W1");
    }

    #[test]
    fn m2_first_offset() {
        // m2(j-1) then m1(j-2) in a 3-2 split: W1 is older than X1.
        let s = lo("m2@-1>m1@-2", 0, 3, 2);
        assert_eq!(s, "W1>X1>W2>X2>X3");
    }

    #[test]
    fn infeasible_lag() {
        let d = DecodingOrder::parse(0, "m1@-1>m2@0").unwrap();
        assert!(matches!(d.to_layer_order(3, 1), Err(Error::InfeasibleOrder(_))));
    }

    #[test]
    fn pair_roundtrip() {
        for f in Family31::ALL {
            let p = f.orders();
            assert_eq!(p.to_string().parse::<OrderPair>().unwrap(), p);
        }
        assert!("d1=m3@0;d2=m2@0".parse::<OrderPair>().is_err());
        assert!("d1=m2@0;d2=m2@0".parse::<OrderPair>().is_err());
        assert!("m1@0".parse::<OrderPair>().is_err());
    }

    #[test]
    fn layer_order_structure() {
        let bad = vec![LayerRef::new(0, 1), LayerRef::new(0, 0)];
        assert!(LayerOrder::new(bad).is_err());
        let o = LayerOrder::new(vec![LayerRef::new(0, 0), LayerRef::new(1, 0), LayerRef::new(0, 1)])
            .unwrap();
        assert!(o.is_alternating());
        let o = LayerOrder::new(vec![LayerRef::new(0, 0), LayerRef::new(0, 1), LayerRef::new(1, 0)])
            .unwrap();
        assert!(!o.is_alternating());
    }

    #[test]
    fn part_orders() {
        let (a, b) = PartOrder::parse_pair("d1=m1.1>m2>m1.2;d2=m1.1>m2").unwrap();
        assert_eq!(a.parts, vec![LayerRef::new(0, 0), LayerRef::new(1, 0), LayerRef::new(0, 1)]);
        assert_eq!(b.parts.len(), 2);
        assert!(PartOrder::parse(0, "m1.1>m1.1").is_err());
    }
}
