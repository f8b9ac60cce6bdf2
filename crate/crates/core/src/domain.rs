//! Admissible quotes, market parameters and the four atomic trader maps.
//!
//! A quote `(b, a)` lives in the triangle `W = {b >= 0, a <= a_upper,
//! a - b >= s_lower}`. Each trader type acts on the column vector `(b, a)'`
//! through a fixed 2x2 matrix; an image that leaves `W` is projected back
//! onto the boundary along the segment joining the quote and its image,
//! and that projection is what the simulator treats as a crash.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Type of the marginal trader arriving in one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TraderType {
    #[serde(rename = "BL")]
    BuyLimit,
    #[serde(rename = "BM")]
    BuyMarket,
    #[serde(rename = "SL")]
    SellLimit,
    #[serde(rename = "SM")]
    SellMarket,
}

impl TraderType {
    /// All types in index order 1..=4 (BL, BM, SL, SM).
    pub const ALL: [TraderType; 4] = [
        TraderType::BuyLimit,
        TraderType::BuyMarket,
        TraderType::SellLimit,
        TraderType::SellMarket,
    ];

    /// Index in `1..=4`.
    pub fn index(self) -> usize {
        match self {
            TraderType::BuyLimit => 1,
            TraderType::BuyMarket => 2,
            TraderType::SellLimit => 3,
            TraderType::SellMarket => 4,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        index.checked_sub(1).and_then(|i| Self::ALL.get(i).copied())
    }

    pub fn label(self) -> &'static str {
        match self {
            TraderType::BuyLimit => "BL",
            TraderType::BuyMarket => "BM",
            TraderType::SellLimit => "SL",
            TraderType::SellMarket => "SM",
        }
    }

    /// The type whose map undoes this one: BL <-> SM, BM <-> SL.
    pub fn inverse(self) -> Self {
        match self {
            TraderType::BuyLimit => TraderType::SellMarket,
            TraderType::BuyMarket => TraderType::SellLimit,
            TraderType::SellLimit => TraderType::BuyMarket,
            TraderType::SellMarket => TraderType::BuyLimit,
        }
    }

    /// Limit types shrink the spread, market types widen it.
    pub fn is_limit(self) -> bool {
        matches!(self, TraderType::BuyLimit | TraderType::SellLimit)
    }

    pub fn is_buy(self) -> bool {
        matches!(self, TraderType::BuyLimit | TraderType::BuyMarket)
    }
}

impl fmt::Display for TraderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown trader type {0:?} (expected BL, BM, SL, SM or 1..4)")]
pub struct ParseTraderTypeError(pub String);

impl FromStr for TraderType {
    type Err = ParseTraderTypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let ty = match t.to_ascii_uppercase().as_str() {
            "BL" | "1" => TraderType::BuyLimit,
            "BM" | "2" => TraderType::BuyMarket,
            "SL" | "3" => TraderType::SellLimit,
            "SM" | "4" => TraderType::SellMarket,
            _ => return Err(ParseTraderTypeError(t.to_string())),
        };
        Ok(ty)
    }
}

/// Best bid `b` and best ask `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quote<T = f64> {
    pub b: T,
    pub a: T,
}

impl<T: Scalar> Quote<T> {
    pub fn new(b: T, a: T) -> Self {
        Quote { b, a }
    }

    pub fn spread(&self) -> T {
        self.a.clone() - self.b.clone()
    }

    pub fn mid(&self) -> T {
        (self.a.clone() + self.b.clone()) / T::two()
    }

    /// `b + a`, the quantity the buy/sell regions are printed in.
    pub fn sum(&self) -> T {
        self.a.clone() + self.b.clone()
    }

    pub fn approx(&self) -> Quote<f64> {
        Quote::new(self.b.approx(), self.a.approx())
    }
}

impl Quote<f64> {
    /// Quote with the given spread and mid-price.
    pub fn from_spread_mid(spread: f64, mid: f64) -> Self {
        Quote::new(mid - spread / 2.0, mid + spread / 2.0)
    }
}

impl<T: fmt::Display> fmt::Display for Quote<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b, self.a)
    }
}

/// 2x2 matrix acting on the column vector `(b, a)'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicMap<T> {
    pub rows: [[T; 2]; 2],
}

impl<T: Scalar> AtomicMap<T> {
    pub fn new(rows: [[T; 2]; 2]) -> Self {
        AtomicMap { rows }
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        AtomicMap::new([[o.clone(), z.clone()], [z, o]])
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Self {
        let m = &self.rows;
        let r = &rhs.rows;
        let entry = |i: usize, j: usize| {
            m[i][0].clone() * r[0][j].clone() + m[i][1].clone() * r[1][j].clone()
        };
        AtomicMap::new([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }

    pub fn apply(&self, q: &Quote<T>) -> Quote<T> {
        let m = &self.rows;
        Quote::new(
            m[0][0].clone() * q.b.clone() + m[0][1].clone() * q.a.clone(),
            m[1][0].clone() * q.b.clone() + m[1][1].clone() * q.a.clone(),
        )
    }

    pub fn det(&self) -> T {
        let m = &self.rows;
        m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()
    }
}

impl<T: PartialEq> PartialEq<[[T; 2]; 2]> for AtomicMap<T> {
    fn eq(&self, other: &[[T; 2]; 2]) -> bool {
        self.rows == *other
    }
}

/// Matrix of one trader type with the book-shape ratio `alpha` on both sides.
pub fn atomic_matrix<T: Scalar>(ty: TraderType, alpha: &T) -> AtomicMap<T> {
    let one = T::one();
    let zero = T::zero();
    let a = alpha.clone();
    let up = one.clone() + a.clone();
    let rows = match ty {
        TraderType::BuyLimit => [
            [one.clone() / up.clone(), a.clone() / up],
            [zero, one],
        ],
        TraderType::BuyMarket => [[one, zero], [-a, up]],
        TraderType::SellLimit => [
            [one.clone(), zero],
            [a / up.clone(), one / up],
        ],
        TraderType::SellMarket => [[up, -a], [zero, one]],
    };
    AtomicMap::new(rows)
}

/// Edge of the admissible triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `a - b = s_lower`
    MinSpread,
    /// `a = a_upper`
    MaxAsk,
    /// `b = 0`
    ZeroBid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeOutcome<T = f64> {
    pub next: Quote<T>,
    /// The raw image left the domain and `next` is its projection onto the boundary.
    pub clipped: bool,
    pub boundary: Option<Boundary>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("alpha = {0} must lie in (0, 1)")]
    AlphaOutOfRange(f64),
    #[error("lower spread bound {0} must be positive")]
    SpreadBoundNotPositive(f64),
    #[error("upper ask bound {a_upper} must exceed the lower spread bound {s_lower}")]
    AskBoundTooLow { s_lower: f64, a_upper: f64 },
    #[error("quote (b = {b}, a = {a}) lies outside the admissible domain")]
    OutsideDomain { b: f64, a: f64 },
}

/// The admissible triangle together with the book-shape ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain<T = f64> {
    alpha: T,
    s_lower: T,
    a_upper: T,
    maps: [AtomicMap<T>; 4],
}

impl<T: Scalar> Domain<T> {
    pub fn new(alpha: T, s_lower: T, a_upper: T) -> Result<Self, DomainError> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(DomainError::AlphaOutOfRange(alpha.approx()));
        }
        if !(s_lower > T::zero()) {
            return Err(DomainError::SpreadBoundNotPositive(s_lower.approx()));
        }
        if !(a_upper > s_lower) {
            return Err(DomainError::AskBoundTooLow {
                s_lower: s_lower.approx(),
                a_upper: a_upper.approx(),
            });
        }
        let maps = TraderType::ALL.map(|ty| atomic_matrix(ty, &alpha));
        Ok(Domain { alpha, s_lower, a_upper, maps })
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    pub fn s_lower(&self) -> &T {
        &self.s_lower
    }

    pub fn a_upper(&self) -> &T {
        &self.a_upper
    }

    pub fn matrix(&self, ty: TraderType) -> &AtomicMap<T> {
        &self.maps[ty.index() - 1]
    }

    /// Signed distances to the three edges, in [`Boundary`] order; all are
    /// non-negative inside the domain.
    fn margins(&self, q: &Quote<T>) -> [T; 3] {
        [
            q.spread() - self.s_lower.clone(),
            self.a_upper.clone() - q.a.clone(),
            q.b.clone(),
        ]
    }

    pub fn contains(&self, q: &Quote<T>) -> bool {
        let floor = -T::slack();
        self.margins(q).iter().all(|m| *m >= floor)
    }

    /// Whether `q` sits on one of the three edges (within slack).
    pub fn on_boundary(&self, q: &Quote<T>) -> bool {
        let slack = T::slack();
        self.contains(q)
            && self
                .margins(q)
                .iter()
                .any(|m| *m <= slack && *m >= -slack.clone())
    }

    pub fn check(&self, q: &Quote<T>) -> Result<(), DomainError> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(DomainError::OutsideDomain { b: q.b.approx(), a: q.a.approx() })
        }
    }

    /// One period with a trader of type `ty`.
    ///
    /// If the matrix image stays in the domain it is returned as is. Otherwise
    /// the result is the exit point of the segment from `q` to the image: the
    /// smallest segment parameter over the violated edges, ties resolved in
    /// [`Boundary`] order.
    pub fn apply(&self, q: &Quote<T>, ty: TraderType) -> Result<TradeOutcome<T>, DomainError> {
        self.check(q)?;
        let image = self.matrix(ty).apply(q);
        if self.contains(&image) {
            return Ok(TradeOutcome { next: image, clipped: false, boundary: None });
        }

        const EDGES: [Boundary; 3] = [Boundary::MinSpread, Boundary::MaxAsk, Boundary::ZeroBid];
        let floor = -T::slack();
        let before = self.margins(q);
        let after = self.margins(&image);
        let mut exit: Option<(T, Boundary)> = None;
        for ((edge, g0), g1) in EDGES.iter().zip(before).zip(after) {
            if g1 >= floor {
                continue;
            }
            let mut lambda = g0.clone() / (g0 - g1);
            if lambda < T::zero() {
                lambda = T::zero();
            }
            if exit.as_ref().is_none_or(|(best, _)| lambda < *best) {
                exit = Some((lambda, *edge));
            }
        }
        let (lambda, edge) = exit.expect("an image outside the domain violates some edge");

        let mut next = Quote::new(
            q.b.clone() + lambda.clone() * (image.b.clone() - q.b.clone()),
            q.a.clone() + lambda * (image.a.clone() - q.a.clone()),
        );
        // land exactly on the edge
        match edge {
            Boundary::ZeroBid => next.b = T::zero(),
            Boundary::MaxAsk => next.a = self.a_upper.clone(),
            Boundary::MinSpread => {
                if image.b != q.b {
                    next.b = next.a.clone() - self.s_lower.clone();
                } else {
                    next.a = next.b.clone() + self.s_lower.clone();
                }
            }
        }
        Ok(TradeOutcome { next, clipped: true, boundary: Some(edge) })
    }
}

/// A single invariant violated by a candidate parameter set.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("{0} is not a finite number")]
    NonFinite(&'static str),
    #[error("alpha = {0} must lie in (0, 1)")]
    AlphaOutOfRange(f64),
    #[error("s_lower = {0} must be positive")]
    SpreadBoundNotPositive(f64),
    #[error("a_upper = {a_upper} must exceed s_lower = {s_lower}")]
    AskBoundTooLow { s_lower: f64, a_upper: f64 },
    #[error("gamma = {gamma} is below alpha/(1+alpha) = {min}; (1-gamma)(1+alpha) <= 1 fails")]
    GammaBelowMinimum { gamma: f64, min: f64 },
    #[error("gamma = {0} must be below 1")]
    GammaNotBelowOne(f64),
    #[error("delta = {0} must be positive")]
    DeltaNotPositive(f64),
    #[error("epsilon = {epsilon} is below delta/(1+delta) = {min}; (1-epsilon)(1+delta) <= 1 fails")]
    EpsilonBelowMinimum { epsilon: f64, min: f64 },
    #[error("epsilon = {0} must be below 1")]
    EpsilonNotBelowOne(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid market parameters: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ParamsError {
    pub violations: Vec<Violation>,
}

/// Validated market parameters.
///
/// The bid-side and ask-side book ratios are both `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketParams {
    alpha: f64,
    s_lower: f64,
    a_upper: f64,
    gamma: f64,
    delta: f64,
    epsilon: f64,
}

// Comparisons of gamma/epsilon against their lower bounds tolerate rounding
// in the bound itself, e.g. gamma = 1/3 for alpha = 1/2.
const BOUND_TOLERANCE: f64 = 1e-12;

impl MarketParams {
    pub fn new(
        alpha: f64,
        s_lower: f64,
        a_upper: f64,
        gamma: f64,
        delta: f64,
        epsilon: f64,
    ) -> Result<Self, ParamsError> {
        let mut violations = Vec::new();
        let named = [
            ("alpha", alpha),
            ("s_lower", s_lower),
            ("a_upper", a_upper),
            ("gamma", gamma),
            ("delta", delta),
            ("epsilon", epsilon),
        ];
        for (name, value) in named {
            if !value.is_finite() {
                violations.push(Violation::NonFinite(name));
            }
        }
        if !violations.is_empty() {
            return Err(ParamsError { violations });
        }

        if !(alpha > 0.0 && alpha < 1.0) {
            violations.push(Violation::AlphaOutOfRange(alpha));
        }
        if s_lower <= 0.0 {
            violations.push(Violation::SpreadBoundNotPositive(s_lower));
        }
        if a_upper <= s_lower {
            violations.push(Violation::AskBoundTooLow { s_lower, a_upper });
        }
        let gamma_min = alpha / (1.0 + alpha);
        if gamma < gamma_min - BOUND_TOLERANCE {
            violations.push(Violation::GammaBelowMinimum { gamma, min: gamma_min });
        }
        if gamma >= 1.0 {
            violations.push(Violation::GammaNotBelowOne(gamma));
        }
        if delta <= 0.0 {
            violations.push(Violation::DeltaNotPositive(delta));
        }
        let epsilon_min = delta / (1.0 + delta);
        if epsilon < epsilon_min - BOUND_TOLERANCE {
            violations.push(Violation::EpsilonBelowMinimum { epsilon, min: epsilon_min });
        }
        if epsilon >= 1.0 {
            violations.push(Violation::EpsilonNotBelowOne(epsilon));
        }

        if violations.is_empty() {
            Ok(MarketParams { alpha, s_lower, a_upper, gamma, delta, epsilon })
        } else {
            Err(ParamsError { violations })
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn s_lower(&self) -> f64 {
        self.s_lower
    }

    pub fn a_upper(&self) -> f64 {
        self.a_upper
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn domain(&self) -> Domain<f64> {
        Domain::new(self.alpha, self.s_lower, self.a_upper)
            .expect("validated parameters form a valid domain")
    }

    /// Spread band `[(1+alpha) s_lower, (1-gamma) a_upper]` between the
    /// market-only and limit-only regions.
    pub fn spread_band(&self) -> (f64, f64) {
        ((1.0 + self.alpha) * self.s_lower, (1.0 - self.gamma) * self.a_upper)
    }

    /// Band on `b + a` between the buy-only and sell-only regions.
    pub fn sum_band(&self) -> (f64, f64) {
        (
            (1.0 + self.delta) * self.s_lower,
            (1.0 - self.epsilon) * (2.0 * self.a_upper - self.s_lower),
        )
    }

    /// [`Self::sum_band`] expressed in mid-prices.
    pub fn mid_band(&self) -> (f64, f64) {
        let (lo, hi) = self.sum_band();
        (lo / 2.0, hi / 2.0)
    }
}
