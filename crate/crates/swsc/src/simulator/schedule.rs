//! Block-Markov message schedule of a K-layer sender.
//!
//! Layer i (1-based) in block t carries message t - K + i. Messages are numbered
//! 1..=b-K+1; slots that would carry any other index hold the known pad message.

use std::fmt::Write;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Slot {
    /// The fixed message known to every receiver.
    Pad,
    /// Message index (1-based).
    Message(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSchedule {
    pub layers: usize,
    pub blocks: usize,
    /// `slots[t][i]`: message on layer i in block t (both 0-based).
    pub slots: Vec<Vec<Slot>>,
}

impl BlockSchedule {
    pub fn new(layers: usize, blocks: usize) -> Result<Self> {
        if layers == 0 || blocks < layers {
            return Err(Error::InvalidConfig(format!("{blocks} blocks cannot carry a {layers}-layer schedule")));
        }
        let count = blocks - layers + 1;
        let slots = (1..=blocks as i64)
            .map(|t| {
                (1..=layers as i64)
                    .map(|i| {
                        let m = t - layers as i64 + i;
                        if (1..=count as i64).contains(&m) {
                            Slot::Message(m as usize)
                        } else {
                            Slot::Pad
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { layers, blocks, slots })
    }

    /// Number of real messages, b - K + 1.
    pub fn messages(&self) -> usize {
        self.blocks - self.layers + 1
    }

    /// (block, layer) slots of message `m` (1-based), 0-based, in codeword segment order:
    /// segment s is on layer K - s in block m + s.
    pub fn message_slots(&self, m: usize) -> Vec<(usize, usize)> {
        (0..self.layers).map(|s| (m - 1 + s, self.layers - 1 - s)).collect()
    }

    /// Fraction of blocks that carry a real message of this stream.
    pub fn rate_factor(&self) -> f64 {
        self.messages() as f64 / self.blocks as f64
    }

    /// Plain-text table with one row per layer, in the layout of the scheme tables.
    pub fn table(&self, stream: usize, layer_name: &str) -> String {
        let mut s = String::from("block");
        for t in 1..=self.blocks {
            write!(s, "\t{t}").unwrap();
        }
        s.push('\n');
        for i in 0..self.layers {
            if self.layers == 1 {
                s.push_str(layer_name);
            } else {
                write!(s, "{layer_name}{}", i + 1).unwrap();
            }
            for t in 0..self.blocks {
                match self.slots[t][i] {
                    Slot::Pad => s.push_str("\t1"),
                    Slot::Message(m) => write!(s, "\tm{stream}({m})").unwrap(),
                }
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_layer_table() {
        let s = BlockSchedule::new(2, 4).unwrap();
        assert_eq!(s.table(1, "X"), "block\t1\t2\t3\t4\nX1\t1\tm1(1)\tm1(2)\tm1(3)\nX2\tm1(1)\tm1(2)\tm1(3)\t1\n");
        assert_eq!(s.messages(), 3);
        assert_eq!(s.message_slots(2), vec![(1, 1), (2, 0)]);
    }

    #[test]
    fn every_message_fills_k_slots() {
        for k in 1..4 {
            for b in k..9 {
                let s = BlockSchedule::new(k, b).unwrap();
                for m in 1..=s.messages() {
                    let n = s.slots.iter().flatten().filter(|&&x| x == Slot::Message(m)).count();
                    assert_eq!(n, k);
                    for (t, i) in s.message_slots(m) {
                        assert_eq!(s.slots[t][i], Slot::Message(m));
                    }
                }
            }
        }
    }
}
