use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainError, MarketParams, Quote, TraderType};
use crate::regions::region_labels;
use crate::stability::kernel_quote_bounds;
use crate::switching::SwitchingLaw;

use super::{Crash, Step, Trajectory};

/// Random source of trajectory `index` under `master_seed`: ChaCha8 keyed
/// by the master seed, with the trajectory index as stream id. Streams do
/// not overlap, so results do not depend on how trajectories are scheduled.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkStep {
    pub t: u64,
    pub quote: Quote,
    pub trader: Option<TraderType>,
    pub clipped: bool,
}

/// Run the switching law for up to `steps` periods, handing every visited
/// state (including `t = 0`) to `visit`. Each period consumes one uniform draw.
pub fn walk<R: Rng>(
    start: Quote,
    steps: u64,
    law: &SwitchingLaw,
    rng: &mut R,
    mut visit: impl FnMut(&WalkStep),
) -> Result<Option<Crash>, DomainError> {
    let domain = law.params().domain();
    domain.check(&start)?;
    let mut q = start;
    visit(&WalkStep { t: 0, quote: q, trader: None, clipped: false });
    for t in 1..=steps {
        let ty = law.type_distribution(&q).sample(rng.gen::<f64>());
        let out = domain.apply(&q, ty)?;
        q = out.next;
        visit(&WalkStep { t, quote: q, trader: Some(ty), clipped: out.clipped });
        if out.clipped {
            return Ok(Some(Crash { t, quote: q }));
        }
    }
    Ok(None)
}

/// Trajectory `stream` of the family seeded by `master_seed`.
pub fn simulate_stream(
    start: Quote,
    steps: u64,
    law: &SwitchingLaw,
    master_seed: u64,
    stream: u64,
) -> Result<Trajectory, DomainError> {
    let params = law.params();
    let mut rng = trajectory_rng(master_seed, stream);
    let mut out = Vec::with_capacity(steps.min(1 << 20) as usize + 1);
    let crash = walk(start, steps, law, &mut rng, |s| {
        out.push(Step { t: s.t, quote: s.quote, trader: s.trader, labels: region_labels(&s.quote, params) })
    })?;
    Ok(Trajectory { steps: out, crash, seed: master_seed })
}

/// Stream 0 of `seed`, i.e. the first trajectory of [`monte_carlo`] with the same seed.
pub fn simulate(start: Quote, steps: u64, law: &SwitchingLaw, seed: u64) -> Result<Trajectory, DomainError> {
    simulate_stream(start, steps, law, seed, 0)
}

/// Quote at the geometric centres of the spread and mid-price bands. When
/// the centre spread does not fit at that mid-price, the spread is the
/// geometric mean of the smallest and largest spreads that do, so the start
/// stays off the boundary. `None` when no spread fits.
pub fn regime_start(params: &MarketParams) -> Option<Quote> {
    let (s_lo, s_hi) = params.spread_band();
    let (m_lo, m_hi) = params.mid_band();
    let s_lo = s_lo.min(s_hi).max(params.s_lower());
    let mid = (m_lo * m_hi).sqrt();
    let cap = 2.0 * mid.min(params.a_upper() - mid);
    if !(cap >= s_lo) {
        return None;
    }
    let centre = (s_lo * s_hi).sqrt().max(s_lo);
    let spread = if centre < cap { centre } else { (s_lo * cap).sqrt() };
    let q = Quote::from_spread_mid(spread, mid);
    params.domain().contains(&q).then_some(q)
}

/// Aggregate over a family of simulated trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub n_trajectories: u64,
    pub n_crashes: u64,
    /// Mean period of the first clipped step over crashed trajectories.
    pub mean_crash_time: Option<f64>,
    /// Visited states, including `t = 0` and crash points.
    pub n_states: u64,
    pub n_states_in_h: u64,
    pub fraction_time_in_h: f64,
    pub max_b: Option<f64>,
    pub max_a: Option<f64>,
    pub min_spread: Option<f64>,
    pub max_spread: Option<f64>,
    pub min_mid: Option<f64>,
    pub max_mid: Option<f64>,
    /// Kernel bound on the ask; `None` when the kernel is empty.
    pub a_bound: Option<f64>,
    /// Kernel bound on the bid.
    pub b_bound: Option<f64>,
    /// States with `a >= a_bound` or `b >= b_bound`.
    pub bound_violations: u64,
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    n_trajectories: u64,
    n_crashes: u64,
    crash_time_sum: u64,
    n_states: u64,
    n_states_in_h: u64,
    max_b: f64,
    max_a: f64,
    min_spread: f64,
    max_spread: f64,
    min_mid: f64,
    max_mid: f64,
    bound_violations: u64,
}

impl Tally {
    const EMPTY: Tally = Tally {
        n_trajectories: 0,
        n_crashes: 0,
        crash_time_sum: 0,
        n_states: 0,
        n_states_in_h: 0,
        max_b: f64::NEG_INFINITY,
        max_a: f64::NEG_INFINITY,
        min_spread: f64::INFINITY,
        max_spread: f64::NEG_INFINITY,
        min_mid: f64::INFINITY,
        max_mid: f64::NEG_INFINITY,
        bound_violations: 0,
    };

    // sums of integers and min/max only, so the merge order is irrelevant
    fn merge(self, o: Tally) -> Tally {
        Tally {
            n_trajectories: self.n_trajectories + o.n_trajectories,
            n_crashes: self.n_crashes + o.n_crashes,
            crash_time_sum: self.crash_time_sum + o.crash_time_sum,
            n_states: self.n_states + o.n_states,
            n_states_in_h: self.n_states_in_h + o.n_states_in_h,
            max_b: self.max_b.max(o.max_b),
            max_a: self.max_a.max(o.max_a),
            min_spread: self.min_spread.min(o.min_spread),
            max_spread: self.max_spread.max(o.max_spread),
            min_mid: self.min_mid.min(o.min_mid),
            max_mid: self.max_mid.max(o.max_mid),
            bound_violations: self.bound_violations + o.bound_violations,
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `n_traj` independent trajectories of at most `steps` periods each;
/// trajectory `i` uses stream `i` of `master_seed`.
pub fn monte_carlo(
    start: Quote,
    steps: u64,
    n_traj: u64,
    law: &SwitchingLaw,
    master_seed: u64,
) -> Result<StabilitySummary, DomainError> {
    let params = law.params();
    params.domain().check(&start)?;
    let bounds = kernel_quote_bounds(params);

    let tally = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut t = Tally { n_trajectories: 1, ..Tally::EMPTY };
            let mut rng = trajectory_rng(master_seed, i);
            let crash = walk(start, steps, law, &mut rng, |s| {
                let q = s.quote;
                let (spread, mid) = (q.spread(), q.mid());
                t.n_states += 1;
                t.n_states_in_h += region_labels(&q, params).in_h as u64;
                t.max_b = t.max_b.max(q.b);
                t.max_a = t.max_a.max(q.a);
                t.min_spread = t.min_spread.min(spread);
                t.max_spread = t.max_spread.max(spread);
                t.min_mid = t.min_mid.min(mid);
                t.max_mid = t.max_mid.max(mid);
                if let Some((a_bound, b_bound)) = bounds {
                    if q.a >= a_bound || q.b >= b_bound {
                        t.bound_violations += 1;
                    }
                }
            })
            .expect("start was checked and steps stay in the domain");
            if let Some(c) = crash {
                t.n_crashes = 1;
                t.crash_time_sum = c.t;
            }
            t
        })
        .reduce(|| Tally::EMPTY, Tally::merge);

    Ok(StabilitySummary {
        n_trajectories: tally.n_trajectories,
        n_crashes: tally.n_crashes,
        mean_crash_time: (tally.n_crashes > 0).then(|| tally.crash_time_sum as f64 / tally.n_crashes as f64),
        n_states: tally.n_states,
        n_states_in_h: tally.n_states_in_h,
        fraction_time_in_h: if tally.n_states == 0 {
            0.0
        } else {
            tally.n_states_in_h as f64 / tally.n_states as f64
        },
        max_b: finite(tally.max_b),
        max_a: finite(tally.max_a),
        min_spread: finite(tally.min_spread),
        max_spread: finite(tally.max_spread),
        min_mid: finite(tally.min_mid),
        max_mid: finite(tally.max_mid),
        a_bound: bounds.map(|b| b.0),
        b_bound: bounds.map(|b| b.1),
        bound_violations: tally.bound_violations,
    })
}
