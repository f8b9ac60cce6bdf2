use crate::domain::{Domain, DomainError, MarketParams, Quote, TraderType};
use crate::regions::region_labels;
use crate::scalar::Scalar;

use super::{Crash, Step, Trajectory};

/// Apply `seq` in order from `start`, stopping at the first clipped step.
pub fn replay(start: Quote, seq: &[TraderType], params: &MarketParams) -> Result<Trajectory, DomainError> {
    replay_iter(start, seq.iter().copied(), params)
}

/// Replay a single type over and over until it crashes, or for at most
/// `max_steps` periods.
pub fn replay_constant(
    start: Quote,
    ty: TraderType,
    params: &MarketParams,
    max_steps: usize,
) -> Result<Trajectory, DomainError> {
    replay_iter(start, std::iter::repeat_n(ty, max_steps), params)
}

fn replay_iter(
    start: Quote,
    seq: impl Iterator<Item = TraderType>,
    params: &MarketParams,
) -> Result<Trajectory, DomainError> {
    let domain = params.domain();
    domain.check(&start)?;
    let mut steps = vec![Step { t: 0, quote: start, trader: None, labels: region_labels(&start, params) }];
    let mut crash = None;
    let mut q = start;
    for (i, ty) in seq.enumerate() {
        let out = domain.apply(&q, ty)?;
        q = out.next;
        let t = i as u64 + 1;
        steps.push(Step { t, quote: q, trader: Some(ty), labels: region_labels(&q, params) });
        if out.clipped {
            crash = Some(Crash { t, quote: q });
            break;
        }
    }
    Ok(Trajectory { steps, crash, seed: 0 })
}

/// Point where a constant stream of one type ends up on the boundary:
/// BL at `(a - s_lower, a)`, BM at `(b, a_upper)`, SL at `(b, b + s_lower)`,
/// SM at `(0, a)`.
pub fn constant_type_limit(start: Quote, ty: TraderType, params: &MarketParams) -> Quote {
    let Quote { b, a } = start;
    match ty {
        TraderType::BuyLimit => Quote::new(a - params.s_lower(), a),
        TraderType::BuyMarket => Quote::new(b, params.a_upper()),
        TraderType::SellLimit => Quote::new(b, b + params.s_lower()),
        TraderType::SellMarket => Quote::new(0.0, a),
    }
}

/// Outcome of replaying a word in an arbitrary scalar backend.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactReplay<T> {
    pub end: Quote<T>,
    /// Number of steps applied, including a final clipped one.
    pub steps: usize,
    pub clipped: bool,
}

pub fn replay_exact<T: Scalar>(
    domain: &Domain<T>,
    start: &Quote<T>,
    seq: &[TraderType],
) -> Result<ExactReplay<T>, DomainError> {
    domain.check(start)?;
    let mut q = start.clone();
    for (i, &ty) in seq.iter().enumerate() {
        let out = domain.apply(&q, ty)?;
        q = out.next;
        if out.clipped {
            return Ok(ExactReplay { end: q, steps: i + 1, clipped: true });
        }
    }
    Ok(ExactReplay { end: q, steps: seq.len(), clipped: false })
}
