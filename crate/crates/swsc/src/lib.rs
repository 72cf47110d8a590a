//! Achievable rate regions and link-level simulation for sliding-window
//! superposition coding (SWSC) over two-user interference channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`channels`]: finite-alphabet and Gaussian interference channels, constellations
//!   and symbol maps.
//! - [`mi`]: conditional mutual information between groups of superposition layers.
//! - [`splits`]: layer splits (erasure splits, the merged three-layer split, MAC splits).
//! - [`regions`]: two-dimensional rate regions, Fourier-Motzkin projection, SWSC and
//!   Han-Kobayashi regions.
//! - [`simulator`]: an end-to-end SWSC transceiver with a convolutional code.
//! - [`cli`]: the `swsc` command-line front end.
//!
//! All rates are in bits per (complex or real) channel use.

pub mod channels;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod mi;
pub mod regions;
pub mod simulator;
pub mod splits;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
