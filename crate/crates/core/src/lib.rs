//! Bid-ask dynamics driven by four atomic trader types on a bounded triangle.
//!
//! Quotes `(b, a)` live in `W = { b >= 0, a <= a_upper, a - b >= s_lower }`.
//! Each trader type acts linearly on the quote; a step whose image would
//! leave `W` is clipped to the boundary and counts as a crash.

// `!(x < y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod capacity;
pub mod domain;
pub mod dynamics;
pub mod polygon;
pub mod regions;
pub mod scalar;
pub mod stability;
pub mod switching;

pub use blocks::{
    enumerate_minimal_blocks, is_irreducible, is_minimal_periodic_block, is_periodic_block, reduce_sequence,
    sequence_matrix, BlockError, BlockReport, TypeSequence,
};
pub use capacity::{limit_capacity, market_capacity, SpreadOutOfRange};
pub use domain::{
    atomic_matrix, AtomicMap, Boundary, Domain, DomainError, MarketParams, ParamsError, Quote, TradeOutcome,
    TraderType, Violation,
};
pub use regions::{kernel_polygon, region_labels, region_polygon, Region, RegionLabels};
pub use scalar::{parse_ratio, ratio, Scalar};
pub use stability::{stability_preconditions, Regime, StabilityReport};
pub use switching::{SwitchCurve, SwitchError, SwitchingLaw, TypeDistribution};
