//! Buffering and kernel regions of the domain.
//!
//! The four forcing regions are printed in terms of the spread `a - b` and
//! the sum `b + a`:
//!
//! ```text
//! W_M: s_lower <= a - b < (1+alpha) s_lower            market types only
//! W_L: (1-gamma) a_upper < a - b <= a_upper            limit types only
//! W_B: s_lower <= b + a < (1+delta) s_lower            buy types only
//! W_S: (1-eps)(2 a_upper - s_lower) < b + a <= 2 a_upper - s_lower
//! ```
//!
//! The buffering region is `H = W_M u W_L u W_B u W_S`, the kernel `K` its
//! closed complement, `U2 = W \ (W_M u W_L)` and `V2 = W \ (W_B u W_S)`.
//! The lower edges of `W_M` and `W_B` and the upper edges of `W_L` and `W_S`
//! are implied by membership in `W` and are not re-tested.

use serde::{Deserialize, Serialize};

use crate::domain::{MarketParams, Quote};
use crate::polygon::{ConvexPolygon, HalfPlane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabels {
    pub in_wm: bool,
    pub in_wl: bool,
    pub in_wb: bool,
    pub in_ws: bool,
    pub in_h: bool,
    pub in_k: bool,
    pub in_u2: bool,
    pub in_v2: bool,
}

pub fn region_labels(q: &Quote, params: &MarketParams) -> RegionLabels {
    let (s_lo, s_hi) = params.spread_band();
    let (sum_lo, sum_hi) = params.sum_band();
    let s = q.spread();
    let sum = q.sum();
    let in_wm = s < s_lo;
    let in_wl = s > s_hi;
    let in_wb = sum < sum_lo;
    let in_ws = sum > sum_hi;
    let in_u2 = !(in_wl || in_wm);
    let in_v2 = !(in_wb || in_ws);
    let in_h = !(in_u2 && in_v2);
    RegionLabels { in_wm, in_wl, in_wb, in_ws, in_h, in_k: !in_h, in_u2, in_v2 }
}

/// Closed regions whose polygons can be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// The whole triangle `W`.
    Domain,
    /// `K = U2 n V2`
    Kernel,
    /// `U2`, the spread band.
    SpreadBand,
    /// `V2`, the mid-price band.
    MidBand,
}

/// Triangle with vertices `(0, s_lower)`, `(0, a_upper)`, `(a_upper - s_lower, a_upper)`.
pub fn domain_polygon(params: &MarketParams) -> ConvexPolygon {
    let (s, top) = (params.s_lower(), params.a_upper());
    ConvexPolygon::new(vec![[0.0, s], [top - s, top], [0.0, top]])
}

fn spread_planes(params: &MarketParams) -> [HalfPlane; 2] {
    let (lo, hi) = params.spread_band();
    // a - b >= lo  and  a - b <= hi
    [HalfPlane::new(1.0, -1.0, -lo), HalfPlane::new(-1.0, 1.0, hi)]
}

fn sum_planes(params: &MarketParams) -> [HalfPlane; 2] {
    let (lo, hi) = params.sum_band();
    [HalfPlane::new(-1.0, -1.0, -lo), HalfPlane::new(1.0, 1.0, hi)]
}

/// Half-planes cutting `region` out of the triangle.
pub fn region_planes(params: &MarketParams, region: Region) -> Vec<HalfPlane> {
    match region {
        Region::Domain => Vec::new(),
        Region::Kernel => spread_planes(params).into_iter().chain(sum_planes(params)).collect(),
        Region::SpreadBand => spread_planes(params).to_vec(),
        Region::MidBand => sum_planes(params).to_vec(),
    }
}

pub fn region_polygon(params: &MarketParams, region: Region) -> ConvexPolygon {
    domain_polygon(params).clip_all(&region_planes(params, region))
}

/// The kernel `K` as a polygon.
pub fn kernel_polygon(params: &MarketParams) -> ConvexPolygon {
    region_polygon(params, Region::Kernel)
}
