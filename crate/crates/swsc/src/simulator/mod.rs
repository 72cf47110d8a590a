//! SWSC transceiver simulation: block-Markov superposition encoding with a binary
//! convolutional code, per-layer LLR demapping and sliding-window successive
//! cancellation, measured against a treat-interference-as-noise baseline.

mod code;
mod curve;
mod demap;
mod link;
mod schedule;

pub use code::{crc16_bits, interleaver, rate_match_pattern, CodeSpec, Codec, ConvCode, CRC_BITS, LLR_CLAMP};
pub use curve::{sweep_curve, theory_point, CurvePoint, CurveReport, SimRow, TheoryPoint, BLER_TARGET};
pub use demap::{demap_llr, LayeredReceiver};
pub use link::{auto_orders, schedules, simulate, BlerReport, ErrorPolicy, IanVariant, SimConfig, SimResult, StreamReport};
pub use schedule::{BlockSchedule, Slot};
