//! How many limit-type or market-type traders a spread can absorb in a row.

use thiserror::Error;

use crate::domain::MarketParams;
use crate::scalar::FLOAT_SLACK;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("spread {spread} lies outside [{min}, {max}]")]
pub struct SpreadOutOfRange {
    pub spread: f64,
    pub min: f64,
    pub max: f64,
}

fn check_range(s: f64, params: &MarketParams) -> Result<(), SpreadOutOfRange> {
    let (min, max) = (params.s_lower(), params.a_upper());
    if s.is_finite() && s >= min && s <= max {
        Ok(())
    } else {
        Err(SpreadOutOfRange { spread: s, min, max })
    }
}

/// `x <= y` up to a relative rounding error of [`FLOAT_SLACK`].
fn le_tol(x: f64, y: f64) -> bool {
    x <= y + FLOAT_SLACK * y.abs().max(1.0)
}

/// Number of consecutive limit-type traders a spread `s` accepts before
/// falling below `s_lower`: the unique `z` with
/// `(1+alpha)^z s_lower <= s < (1+alpha)^(z+1) s_lower`.
///
/// Band edges are compared with the float membership tolerance.
pub fn limit_capacity(s: f64, params: &MarketParams) -> Result<u32, SpreadOutOfRange> {
    check_range(s, params)?;
    let growth = 1.0 + params.alpha();
    let s_lower = params.s_lower();
    let mut z = ((s.ln() - s_lower.ln()) / growth.ln()).floor().max(0.0) as i32;
    // the log quotient can land one ulp on the wrong side of an integer
    while z > 0 && !le_tol(growth.powi(z) * s_lower, s) {
        z -= 1;
    }
    while le_tol(growth.powi(z + 1) * s_lower, s) {
        z += 1;
    }
    Ok(z as u32)
}

/// Number of consecutive market-type traders a spread `s` accepts while
/// staying at or below `(1-gamma) a_upper`:
/// `max(floor(log_{1+alpha}((1-gamma) a_upper / s) + 1), 0)`.
pub fn market_capacity(s: f64, params: &MarketParams) -> Result<u32, SpreadOutOfRange> {
    check_range(s, params)?;
    let growth = 1.0 + params.alpha();
    let ceiling = (1.0 - params.gamma()) * params.a_upper();
    let raw = ((ceiling.ln() - s.ln()) / growth.ln() + 1.0).floor();
    let mut y = raw.max(0.0) as i32;
    // y counts k = 0..y-1 with s (1+alpha)^k <= ceiling
    while y > 0 && !le_tol(s * growth.powi(y - 1), ceiling) {
        y -= 1;
    }
    while le_tol(s * growth.powi(y), ceiling) {
        y += 1;
    }
    Ok(y as u32)
}
