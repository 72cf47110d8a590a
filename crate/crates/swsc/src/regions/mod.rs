//! Achievable rate regions.

mod basic;
mod fm;
mod gap;
mod hk;
mod layered;
mod orders;
mod region2;

pub use basic::{region_ian, region_scd, region_sd, region_snd, IcInfo, ReceiverInfo};
pub use fm::{fm_project, FmConstraint, FmMode, FmSystem, Projected, Projection};
pub use gap::{rs_gap_demo, GapConfig, GapReport, GapScheme, SplitParams};
pub use hk::{
    hk_coverage, hk_layer_order, hk_mac_region, hk_receiver_bounds, hk_split, mac3_corner_combination,
    mac3_layer_order, mac3_layered_rates, mac_constraints, region_hk, region_mac3, Constraint4, HkCoverage,
    HkParams, Mac3Region, RateRegion4, MAC3_CORNERS,
};
pub use layered::{
    lo_rates, region_rate_splitting, region_swsc, region_swsc_union, split_31, sweep_swsc_31,
    swsc_bounds, with_block_loss, OrderFamily, SweepPoint,
};
pub use orders::{DecodingOrder, Family31, LayerOrder, OrderPair, PartOrder, Step};
pub use region2::{BoundaryPoint, Conjunction, HalfPlane, RateRegion2};
