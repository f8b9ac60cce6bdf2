//! Which stability regime a parameter set falls into.
//!
//! Three regimes are distinguished:
//!
//! * **kernel**: `H` nonempty and `min(r_s(K), r_m(K)) > alpha(1+alpha)(2+alpha) s_lower`;
//! * **spread-controlled**: `0 <= r_s(U2) < alpha(1+alpha) s_lower` and
//!   `r_m(V2) > alpha(1+alpha)(2+alpha) s_lower`;
//! * **mid-controlled**: `0 <= r_m(V2) < alpha(1+alpha) s_lower / 2` and
//!   `r_s(U2) > alpha(1+alpha)(2+alpha) s_lower`.
//!
//! Both switching curves are strictly monotone on their bands, so the
//! monotonicity conditions hold by construction.

use serde::Serialize;

use crate::domain::{MarketParams, Quote};
use crate::regions::{region_labels, region_polygon, Region};

/// Regimes in which a stability statement applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Kernel,
    SpreadControlled,
    MidControlled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `alpha (1+alpha)(2+alpha) s_lower`
    pub threshold: f64,
    /// `alpha (1+alpha) s_lower`
    pub spread_control_bound: f64,
    /// `alpha (1+alpha) s_lower / 2`
    pub mid_control_bound: f64,
    pub buffer_nonempty: bool,
    pub kernel_range_s: Option<f64>,
    pub kernel_range_m: Option<f64>,
    pub spread_band_range_s: Option<f64>,
    pub mid_band_range_m: Option<f64>,
    pub kernel_regime: bool,
    pub spread_controlled: bool,
    pub mid_controlled: bool,
    /// `l` with `s_lower / a_upper = (1-gamma)/(1+alpha)^l`; set in the spread-controlled regime.
    pub exponent_l: Option<f64>,
    /// `h = 3 - l`
    pub exponent_h: Option<f64>,
    /// `(1-gamma)(1+alpha)^h <= 1`
    pub height_check: Option<bool>,
    /// Mid-price bounds `(m_lo, m_hi)` of the mid-controlled regime.
    pub mid_bounds: Option<(f64, f64)>,
    /// Upper bounds `(a_bound, b_bound)` on the ask and bid inside the kernel.
    pub quote_bounds: Option<(f64, f64)>,
}

impl StabilityReport {
    pub fn holds(&self, regime: Regime) -> bool {
        match regime {
            Regime::Kernel => self.kernel_regime,
            Regime::SpreadControlled => self.spread_controlled,
            Regime::MidControlled => self.mid_controlled,
        }
    }
}

/// Bounds `a_t < r_m(K) + r_s(K)/2 + 2 s_lower` and `b_t < r_m(K) + 2 s_lower`.
pub fn kernel_quote_bounds(params: &MarketParams) -> Option<(f64, f64)> {
    let k = region_polygon(params, Region::Kernel);
    let (rs, rm) = (k.range_s()?, k.range_m()?);
    let s = params.s_lower();
    Some((rm + rs / 2.0 + 2.0 * s, rm + 2.0 * s))
}

/// Mid-price bounds of the mid-controlled regime:
/// `m_lo = (1+delta) s_lower/2 - alpha (1-gamma) a_upper / 2`,
/// `m_hi = (1-epsilon)(a_upper - s_lower/2) + alpha (1-gamma) a_upper / 2`.
pub fn mid_controlled_bounds(params: &MarketParams) -> (f64, f64) {
    let (m_lo, m_hi) = params.mid_band();
    let overflow = params.alpha() * params.spread_band().1 / 2.0;
    (m_lo - overflow, m_hi + overflow)
}

pub fn stability_preconditions(params: &MarketParams) -> StabilityReport {
    let alpha = params.alpha();
    let s_lower = params.s_lower();
    let threshold = alpha * (1.0 + alpha) * (2.0 + alpha) * s_lower;
    let spread_control_bound = alpha * (1.0 + alpha) * s_lower;
    let mid_control_bound = spread_control_bound / 2.0;

    let kernel = region_polygon(params, Region::Kernel);
    let u2 = region_polygon(params, Region::SpreadBand);
    let v2 = region_polygon(params, Region::MidBand);
    let whole = region_polygon(params, Region::Domain);

    // every forcing band, if nonempty, contains an extreme point of a linear
    // functional over W, hence a vertex of W
    let buffer_nonempty = whole
        .vertices
        .iter()
        .any(|&[b, a]| region_labels(&Quote::new(b, a), params).in_h);

    let kernel_range_s = kernel.range_s();
    let kernel_range_m = kernel.range_m();
    let spread_band_range_s = u2.range_s();
    let mid_band_range_m = v2.range_m();

    let kernel_regime = buffer_nonempty
        && matches!((kernel_range_s, kernel_range_m), (Some(rs), Some(rm)) if rs.min(rm) > threshold);
    let spread_controlled = matches!(
        (spread_band_range_s, mid_band_range_m),
        (Some(rs), Some(rm)) if rs < spread_control_bound && rm > threshold
    );
    let mid_controlled = matches!(
        (spread_band_range_s, mid_band_range_m),
        (Some(rs), Some(rm)) if rm < mid_control_bound && rs > threshold
    );

    let (exponent_l, exponent_h, height_check) = if spread_controlled {
        let growth = 1.0 + alpha;
        let l = ((1.0 - params.gamma()) * params.a_upper() / s_lower).ln() / growth.ln();
        let h = 3.0 - l;
        let check = (1.0 - params.gamma()) * growth.powf(h) <= 1.0 + 1e-12;
        (Some(l), Some(h), Some(check))
    } else {
        (None, None, None)
    };

    StabilityReport {
        threshold,
        spread_control_bound,
        mid_control_bound,
        buffer_nonempty,
        kernel_range_s,
        kernel_range_m,
        spread_band_range_s,
        mid_band_range_m,
        kernel_regime,
        spread_controlled,
        mid_controlled,
        exponent_l,
        exponent_h,
        height_check,
        mid_bounds: mid_controlled.then(|| mid_controlled_bounds(params)),
        quote_bounds: kernel_quote_bounds(params),
    }
}
