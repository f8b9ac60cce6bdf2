//! State-dependent law of the next trader type.
//!
//! The limit-type probability `pi_L` depends on the spread only: 0 on `W_M`,
//! 1 on `W_L`, and a strictly increasing curve of `log s` across the spread
//! band. The buy-type probability `pi_B` mirrors it on the mid-price: 1 on
//! `W_B`, 0 on `W_S`, strictly decreasing in `log m` across the mid band.
//! The two are combined as independent marginals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{MarketParams, Quote, TraderType};

/// Monotone shape of the switching probability on its band, as a map
/// `[0, 1] -> [0, 1]` of the normalised log-position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchCurve {
    /// Affine in the logarithm.
    #[default]
    LogLinear,
    /// `u^2 (3 - 2u)` in the normalised logarithm; flat at both band edges.
    LogSmoothstep,
}

impl SwitchCurve {
    pub fn eval(self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            SwitchCurve::LogLinear => u,
            SwitchCurve::LogSmoothstep => u * u * (3.0 - 2.0 * u),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SwitchCurve::LogLinear => "log_linear",
            SwitchCurve::LogSmoothstep => "log_smoothstep",
        }
    }
}

impl fmt::Display for SwitchCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SwitchCurve {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "log_linear" => Ok(SwitchCurve::LogLinear),
            "log_smoothstep" => Ok(SwitchCurve::LogSmoothstep),
            other => Err(format!("unknown switch curve {other:?} (expected log_linear or log_smoothstep)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SwitchError {
    #[error("spread band [{lo}, {hi}] is degenerate; need (1+alpha) s_lower < (1-gamma) a_upper")]
    DegenerateSpreadBand { lo: f64, hi: f64 },
    #[error("mid-price band [{lo}, {hi}] is degenerate; need (1+delta) s_lower < (1-epsilon)(2 a_upper - s_lower)")]
    DegenerateMidBand { lo: f64, hi: f64 },
    #[error("probabilities must be finite, non-negative and sum to 1, got {0:?}")]
    InvalidDistribution([f64; 4]),
}

/// Probabilities of BL, BM, SL, SM in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeDistribution {
    pub p: [f64; 4],
}

const SUM_TOLERANCE: f64 = 1e-12;

impl TypeDistribution {
    pub fn new(p: [f64; 4]) -> Result<Self, SwitchError> {
        let valid = p.iter().all(|x| x.is_finite() && (0.0..=1.0).contains(x))
            && (p.iter().sum::<f64>() - 1.0).abs() <= SUM_TOLERANCE;
        if valid {
            Ok(TypeDistribution { p })
        } else {
            Err(SwitchError::InvalidDistribution(p))
        }
    }

    /// Joint law with independent limit/market and buy/sell marginals.
    pub fn from_marginals(limit: f64, buy: f64) -> Self {
        let (l, b) = (limit.clamp(0.0, 1.0), buy.clamp(0.0, 1.0));
        TypeDistribution {
            p: [l * b, (1.0 - l) * b, l * (1.0 - b), (1.0 - l) * (1.0 - b)],
        }
    }

    pub fn prob(&self, ty: TraderType) -> f64 {
        self.p[ty.index() - 1]
    }

    pub fn limit(&self) -> f64 {
        self.p[0] + self.p[2]
    }

    pub fn market(&self) -> f64 {
        self.p[1] + self.p[3]
    }

    pub fn buy(&self) -> f64 {
        self.p[0] + self.p[1]
    }

    pub fn sell(&self) -> f64 {
        self.p[2] + self.p[3]
    }

    /// Inverse CDF over (BL, BM, SL, SM) for a uniform draw `u` in `[0, 1)`.
    ///
    /// Types with zero probability are never returned.
    pub fn sample(&self, u: f64) -> TraderType {
        let mut acc = 0.0;
        let mut last_positive = None;
        for (i, &p) in self.p.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last_positive = Some(i);
            if u < acc {
                return TraderType::ALL[i];
            }
        }
        // only reachable when rounding leaves the total a hair under 1
        TraderType::ALL[last_positive.expect("a distribution has some positive mass")]
    }
}

/// Switching law built from validated parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingLaw {
    params: MarketParams,
    curve: SwitchCurve,
    spread_band: (f64, f64),
    sum_band: (f64, f64),
    log_spread_lo: f64,
    log_spread_width: f64,
    log_mid_lo: f64,
    log_mid_width: f64,
}

impl SwitchingLaw {
    pub fn new(params: MarketParams, curve: SwitchCurve) -> Result<Self, SwitchError> {
        let (s_lo, s_hi) = params.spread_band();
        if !(s_lo < s_hi) {
            return Err(SwitchError::DegenerateSpreadBand { lo: s_lo, hi: s_hi });
        }
        let (m_lo, m_hi) = params.mid_band();
        if !(m_lo < m_hi) {
            return Err(SwitchError::DegenerateMidBand { lo: m_lo, hi: m_hi });
        }
        Ok(SwitchingLaw {
            params,
            curve,
            spread_band: (s_lo, s_hi),
            sum_band: params.sum_band(),
            log_spread_lo: s_lo.ln(),
            log_spread_width: s_hi.ln() - s_lo.ln(),
            log_mid_lo: m_lo.ln(),
            log_mid_width: m_hi.ln() - m_lo.ln(),
        })
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    pub fn curve(&self) -> SwitchCurve {
        self.curve
    }

    /// `pi_L` at spread `s`.
    pub fn limit_prob_at(&self, s: f64) -> f64 {
        let (lo, hi) = self.spread_band;
        if s < lo {
            0.0
        } else if s > hi {
            1.0
        } else {
            self.curve.eval((s.ln() - self.log_spread_lo) / self.log_spread_width)
        }
    }

    /// `pi_B` at `b + a = sum`.
    pub fn buy_prob_at_sum(&self, sum: f64) -> f64 {
        let (lo, hi) = self.sum_band;
        if sum < lo {
            1.0
        } else if sum > hi {
            0.0
        } else {
            let m = sum / 2.0;
            1.0 - self.curve.eval((m.ln() - self.log_mid_lo) / self.log_mid_width)
        }
    }

    /// `pi_L(q)`
    pub fn prob_limit(&self, q: &Quote) -> f64 {
        self.limit_prob_at(q.spread())
    }

    /// `pi_B(q)`
    pub fn prob_buy(&self, q: &Quote) -> f64 {
        self.buy_prob_at_sum(q.sum())
    }

    pub fn type_distribution(&self, q: &Quote) -> TypeDistribution {
        TypeDistribution::from_marginals(self.prob_limit(q), self.prob_buy(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law() -> SwitchingLaw {
        let p = MarketParams::new(0.5, 1.0, 100.0, 0.9, 1.0, 0.5).unwrap();
        SwitchingLaw::new(p, SwitchCurve::LogLinear).unwrap()
    }

    #[test]
    fn limit_probability_examples() {
        let law = law();
        assert_eq!(law.limit_prob_at(1.5), 0.0);
        assert!((law.limit_prob_at(10.0) - 1.0).abs() < 1e-12);
        assert!((law.limit_prob_at(15f64.sqrt()) - 0.5).abs() < 1e-12);
        assert_eq!(law.limit_prob_at(1.2), 0.0);
        assert_eq!(law.limit_prob_at(20.0), 1.0);
    }

    #[test]
    fn buy_probability_examples() {
        let law = law();
        assert_eq!(law.buy_prob_at_sum(2.0), 1.0);
        assert!(law.buy_prob_at_sum(99.5).abs() < 1e-12);
        assert!((law.buy_prob_at_sum(2.0 * 49.75f64.sqrt()) - 0.5).abs() < 1e-12);
        assert_eq!(law.buy_prob_at_sum(1.5), 1.0);
        assert_eq!(law.buy_prob_at_sum(150.0), 0.0);
    }

    #[test]
    fn product_distribution_example() {
        let d = TypeDistribution::from_marginals(0.6, 0.3);
        let expected = [0.18, 0.12, 0.42, 0.28];
        for (got, want) in d.p.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((d.p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((d.limit() - 0.6).abs() < 1e-15);
        assert!((d.buy() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn forced_corners() {
        let law = law();
        // W_M n W_B
        let d = law.type_distribution(&Quote::new(0.2, 1.5));
        assert_eq!(d.p, [0.0, 1.0, 0.0, 0.0]);
        for u in [0.0, 0.3, 0.999_999] {
            assert_eq!(d.sample(u), TraderType::BuyMarket);
        }
        // W_L n W_S
        let d = law.type_distribution(&Quote::new(44.0, 60.0));
        assert_eq!(d.p, [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.sample(0.0), TraderType::SellLimit);
    }

    #[test]
    fn inverse_cdf_order() {
        let d = TypeDistribution::new([0.25, 0.25, 0.25, 0.25]).unwrap();
        assert_eq!(d.sample(0.1), TraderType::BuyLimit);
        assert_eq!(d.sample(0.3), TraderType::BuyMarket);
        assert_eq!(d.sample(0.6), TraderType::SellLimit);
        assert_eq!(d.sample(0.9), TraderType::SellMarket);
        assert_eq!(d.sample(0.25), TraderType::BuyMarket);
    }

    #[test]
    fn invalid_distribution_rejected() {
        assert!(TypeDistribution::new([0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(TypeDistribution::new([-0.1, 0.6, 0.5, 0.0]).is_err());
    }

    #[test]
    fn degenerate_bands_rejected() {
        // (1-gamma) a_upper = 1 < (1+alpha) s_lower = 1.5
        let p = MarketParams::new(0.5, 1.0, 100.0, 0.99, 1.0, 0.5).unwrap();
        assert!(matches!(
            SwitchingLaw::new(p, SwitchCurve::LogLinear),
            Err(SwitchError::DegenerateSpreadBand { .. })
        ));
        // (1-epsilon)(2 a_upper - s_lower) = 1.99 < (1+delta) s_lower = 2
        let p = MarketParams::new(0.5, 1.0, 100.0, 0.9, 1.0, 0.99).unwrap();
        assert!(matches!(
            SwitchingLaw::new(p, SwitchCurve::LogLinear),
            Err(SwitchError::DegenerateMidBand { .. })
        ));
    }

    #[test]
    fn smoothstep_shares_edges_and_midpoint() {
        let p = MarketParams::new(0.5, 1.0, 100.0, 0.9, 1.0, 0.5).unwrap();
        let law = SwitchingLaw::new(p, SwitchCurve::LogSmoothstep).unwrap();
        assert_eq!(law.limit_prob_at(1.5), 0.0);
        assert!((law.limit_prob_at(15f64.sqrt()) - 0.5).abs() < 1e-12);
        assert!((law.limit_prob_at(9.999_999_999) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn curve_names_parse() {
        for c in [SwitchCurve::LogLinear, SwitchCurve::LogSmoothstep] {
            assert_eq!(c.name().parse::<SwitchCurve>().unwrap(), c);
        }
        assert!("cubic".parse::<SwitchCurve>().is_err());
    }
}
