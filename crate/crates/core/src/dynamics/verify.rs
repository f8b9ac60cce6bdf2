//! Numerical checks of the stability statements.
//!
//! Almost-sure statements are checked on a finite family of trajectories:
//! every sampled state must satisfy them. Statements that only hold in the
//! limit are reported against a threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::blocks::reduce_sequence;
use crate::domain::{DomainError, MarketParams, Quote, TraderType};
use crate::regions::region_labels;
use crate::scalar::exact_from_f64;
use crate::stability::{kernel_quote_bounds, stability_preconditions, Regime};
use crate::switching::{SwitchCurve, SwitchError, SwitchingLaw};

use super::derived::eps_value_set;
use super::replay::{constant_type_limit, replay_constant};
use super::simulate::{regime_start, trajectory_rng, walk};

/// Match tolerance for closed-form crash points.
pub const CRASH_POINT_TOLERANCE: f64 = 1e-12;
/// Tolerance on two-period quantities tracked in floating point.
pub const PAIR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Proposition {
    /// Constant-type streams crash at closed-form points.
    P1,
    /// Words that survive are reducible.
    P3,
    /// Kernel regime: no crash, little time in `H`, bounded quotes.
    P4,
    /// Spread-controlled regime.
    P5,
    /// Mid-controlled regime.
    P6,
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Proposition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().trim_start_matches('P') {
            "1" => Ok(Proposition::P1),
            "3" => Ok(Proposition::P3),
            "4" => Ok(Proposition::P4),
            "5" => Ok(Proposition::P5),
            "6" => Ok(Proposition::P6),
            _ => Err(format!("unknown proposition {s:?} (expected one of P1, P3, P4, P5, P6)")),
        }
    }
}

/// How much work a verification may do.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub n_traj: u64,
    pub steps: u64,
    pub seed: u64,
    /// Starting quote; the band-centre quote when `None`.
    pub start: Option<Quote>,
    /// Largest acceptable fraction of states in `H`.
    pub h_threshold: f64,
    /// Word length for P3.
    pub word_len: usize,
    /// Random interior starts for P1.
    pub n_starts: usize,
    pub curve: SwitchCurve,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            n_traj: 200,
            steps: 100_000,
            seed: 0,
            start: None,
            h_threshold: 0.05,
            word_len: 64,
            n_starts: 100,
            curve: SwitchCurve::LogLinear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub proposition: Proposition,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Measured quantities that are reported but not asserted.
    pub diagnostics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("preconditions of {proposition} do not hold: {reason}")]
    Preconditions { proposition: Proposition, reason: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Switch(#[from] SwitchError),
}

pub fn verify_proposition(
    params: &MarketParams,
    which: Proposition,
    budget: &Budget,
) -> Result<VerificationReport, VerifyError> {
    let mut report = Report::default();
    match which {
        Proposition::P1 => verify_p1(params, budget, &mut report)?,
        Proposition::P3 => verify_p3(params, budget, &mut report)?,
        Proposition::P4 => verify_p4(params, budget, &mut report)?,
        Proposition::P5 => verify_p5(params, budget, &mut report)?,
        Proposition::P6 => verify_p6(params, budget, &mut report)?,
    }
    Ok(VerificationReport {
        proposition: which,
        passed: report.checks.iter().all(|c| c.passed),
        checks: report.checks,
        diagnostics: report.diagnostics,
    })
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
    diagnostics: BTreeMap<String, f64>,
}

impl Report {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }

    fn note(&mut self, name: &str, value: f64) {
        self.diagnostics.insert(name.to_string(), value);
    }
}

fn start_for(params: &MarketParams, budget: &Budget, which: Proposition) -> Result<Quote, VerifyError> {
    let start = match budget.start {
        Some(q) => q,
        None => regime_start(params).ok_or_else(|| VerifyError::Preconditions {
            proposition: which,
            reason: "no start quote given and the band centres do not fit in the domain".into(),
        })?,
    };
    params.domain().check(&start)?;
    Ok(start)
}

fn require(report_ok: bool, which: Proposition, reason: impl FnOnce() -> String) -> Result<(), VerifyError> {
    if report_ok {
        Ok(())
    } else {
        Err(VerifyError::Preconditions { proposition: which, reason: reason() })
    }
}

fn show(x: Option<f64>) -> String {
    x.map_or_else(|| "empty".into(), |v| v.to_string())
}

fn verify_p1(params: &MarketParams, budget: &Budget, report: &mut Report) -> Result<(), VerifyError> {
    let (s_lower, a_upper) = (params.s_lower(), params.a_upper());
    // the spread moves by a factor 1+alpha per period, so this many steps always reach the boundary
    let max_steps = ((a_upper / s_lower).ln() / params.alpha().ln_1p()).ceil() as usize + 2;
    let mut rng = trajectory_rng(budget.seed, 0);
    let mut starts = Vec::with_capacity(budget.n_starts);
    while starts.len() < budget.n_starts {
        let s = rng.gen_range(s_lower..a_upper);
        let b = rng.gen_range(0.0..a_upper - s);
        let q = Quote::new(b, b + s);
        if b > 0.0 && s > s_lower && q.a < a_upper {
            starts.push(q);
        }
    }

    let mut worst = 0.0f64;
    let mut misses = 0usize;
    let mut max_periods = 0u64;
    for q in &starts {
        for ty in TraderType::ALL {
            let traj = replay_constant(*q, ty, params, max_steps)?;
            let want = constant_type_limit(*q, ty, params);
            match traj.crash {
                Some(c) => {
                    let err = (c.quote.b - want.b).abs().max((c.quote.a - want.a).abs());
                    worst = worst.max(err);
                    max_periods = max_periods.max(c.t);
                    if err > CRASH_POINT_TOLERANCE {
                        misses += 1;
                    }
                }
                None => misses += 1,
            }
        }
    }
    report.check(
        "constant-type streams crash at the closed-form points",
        misses == 0,
        format!(
            "{} starts x 4 types, {misses} misses, worst deviation {worst:e}, longest run {max_periods} periods",
            starts.len()
        ),
    );
    report.note("worst_deviation", worst);
    report.note("max_periods_to_crash", max_periods as f64);
    Ok(())
}

fn verify_p3(params: &MarketParams, budget: &Budget, report: &mut Report) -> Result<(), VerifyError> {
    let law = SwitchingLaw::new(*params, budget.curve)?;
    let start = start_for(params, budget, Proposition::P3)?;
    let alpha = exact_from_f64(params.alpha()).expect("alpha is finite");
    let len = budget.word_len;

    let outcomes: Vec<Option<bool>> = (0..budget.n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(budget.seed, i);
            let mut word = Vec::with_capacity(len);
            let crash = walk(start, len as u64, &law, &mut rng, |s| word.extend(s.trader))
                .expect("start was checked");
            // None: crashed, Some(reducible)
            crash.is_none().then(|| reduce_sequence(&word, &alpha, len).len() < word.len())
        })
        .collect();
    let survivors = outcomes.iter().flatten().count();
    let reducible = outcomes.iter().flatten().filter(|r| **r).count();
    report.check(
        "every surviving word contains a periodic block",
        reducible == survivors,
        format!("{survivors} of {} words of length {len} survived; {reducible} reducible", outcomes.len()),
    );
    report.note("surviving_words", survivors as f64);
    report.note("reducible_survivors", reducible as f64);
    report.note("crashed_words", (outcomes.len() - survivors) as f64);
    Ok(())
}

/// Per-family statistics shared by the regime checks.
#[derive(Debug, Clone, Copy)]
struct Observed {
    n_crashes: u64,
    crash_time_sum: u64,
    n_states: u64,
    in_h: u64,
    in_u2: u64,
    in_v2: u64,
    min_spread: f64,
    max_spread: f64,
    min_mid: f64,
    max_mid: f64,
    bound_violations: u64,
    /// Largest `|s_{2t} - s_0| / s_0`.
    even_spread_dev: f64,
    /// Largest `|eta_{2t} eta_{2t+1} - 1|`.
    eta_pair_dev: f64,
    n_pairs: u64,
    eps_outside: u64,
    eps_zero: u64,
}

impl Observed {
    const EMPTY: Observed = Observed {
        n_crashes: 0,
        crash_time_sum: 0,
        n_states: 0,
        in_h: 0,
        in_u2: 0,
        in_v2: 0,
        min_spread: f64::INFINITY,
        max_spread: f64::NEG_INFINITY,
        min_mid: f64::INFINITY,
        max_mid: f64::NEG_INFINITY,
        bound_violations: 0,
        even_spread_dev: 0.0,
        eta_pair_dev: 0.0,
        n_pairs: 0,
        eps_outside: 0,
        eps_zero: 0,
    };

    fn merge(self, o: Observed) -> Observed {
        Observed {
            n_crashes: self.n_crashes + o.n_crashes,
            crash_time_sum: self.crash_time_sum + o.crash_time_sum,
            n_states: self.n_states + o.n_states,
            in_h: self.in_h + o.in_h,
            in_u2: self.in_u2 + o.in_u2,
            in_v2: self.in_v2 + o.in_v2,
            min_spread: self.min_spread.min(o.min_spread),
            max_spread: self.max_spread.max(o.max_spread),
            min_mid: self.min_mid.min(o.min_mid),
            max_mid: self.max_mid.max(o.max_mid),
            bound_violations: self.bound_violations + o.bound_violations,
            even_spread_dev: self.even_spread_dev.max(o.even_spread_dev),
            eta_pair_dev: self.eta_pair_dev.max(o.eta_pair_dev),
            n_pairs: self.n_pairs + o.n_pairs,
            eps_outside: self.eps_outside + o.eps_outside,
            eps_zero: self.eps_zero + o.eps_zero,
        }
    }
}

fn observe(params: &MarketParams, budget: &Budget, start: Quote) -> Result<Observed, VerifyError> {
    let law = SwitchingLaw::new(*params, budget.curve)?;
    let bounds = kernel_quote_bounds(params);
    let alpha = params.alpha();
    let s0 = start.spread();

    let observed = (0..budget.n_traj)
        .into_par_iter()
        .map(|i| {
            let mut o = Observed::EMPTY;
            let mut rng = trajectory_rng(budget.seed, i);
            // (quote at 2t, eta_{2t})
            let mut pair_start = start;
            let mut first_eta = 1.0;
            let mut prev = start;
            let crash = walk(start, budget.steps, &law, &mut rng, |s| {
                let q = s.quote;
                let labels = region_labels(&q, params);
                o.n_states += 1;
                o.in_h += labels.in_h as u64;
                o.in_u2 += labels.in_u2 as u64;
                o.in_v2 += labels.in_v2 as u64;
                o.min_spread = o.min_spread.min(q.spread());
                o.max_spread = o.max_spread.max(q.spread());
                o.min_mid = o.min_mid.min(q.mid());
                o.max_mid = o.max_mid.max(q.mid());
                if let Some((a_bound, b_bound)) = bounds {
                    o.bound_violations += (q.a >= a_bound || q.b >= b_bound) as u64;
                }
                if s.t == 0 || s.clipped {
                    prev = q;
                    return;
                }
                let eta = q.spread() / prev.spread();
                prev = q;
                if s.t % 2 == 1 {
                    first_eta = eta;
                    return;
                }
                o.n_pairs += 1;
                o.eta_pair_dev = o.eta_pair_dev.max((first_eta * eta - 1.0).abs());
                o.even_spread_dev = o.even_spread_dev.max((q.spread() - s0).abs() / s0);
                let eps = q.mid() - pair_start.mid();
                let scale = alpha * pair_start.spread();
                if eps.abs() <= PAIR_TOLERANCE * scale.max(1.0) {
                    o.eps_zero += 1;
                }
                let in_set = eps_value_set(alpha, pair_start.spread())
                    .iter()
                    .any(|v| (eps - v).abs() <= PAIR_TOLERANCE * scale.max(1.0));
                o.eps_outside += (!in_set) as u64;
                pair_start = q;
            })
            .expect("start was checked");
            if let Some(c) = crash {
                o.n_crashes = 1;
                o.crash_time_sum = c.t;
            }
            o
        })
        .reduce(|| Observed::EMPTY, Observed::merge);
    Ok(observed)
}

fn note_family(report: &mut Report, budget: &Budget, start: Quote, o: &Observed) {
    let n = o.n_states.max(1) as f64;
    report.note("trajectories", budget.n_traj as f64);
    report.note("steps", budget.steps as f64);
    report.note("start_b", start.b);
    report.note("start_a", start.a);
    report.note("crashes", o.n_crashes as f64);
    if o.n_crashes > 0 {
        report.note("mean_crash_time", o.crash_time_sum as f64 / o.n_crashes as f64);
    }
    report.note("states", o.n_states as f64);
    report.note("fraction_in_h", o.in_h as f64 / n);
    report.note("fraction_in_u2", o.in_u2 as f64 / n);
    report.note("fraction_in_v2", o.in_v2 as f64 / n);
    report.note("min_spread", o.min_spread);
    report.note("max_spread", o.max_spread);
    report.note("min_mid", o.min_mid);
    report.note("max_mid", o.max_mid);
}

fn crash_check(report: &mut Report, o: &Observed) {
    report.check("no trajectory crashes", o.n_crashes == 0, format!("{} crashed", o.n_crashes));
}

fn verify_p4(params: &MarketParams, budget: &Budget, report: &mut Report) -> Result<(), VerifyError> {
    let pre = stability_preconditions(params);
    require(pre.holds(Regime::Kernel), Proposition::P4, || {
        format!(
            "need H nonempty and min(r_s(K), r_m(K)) > {}; got r_s(K) = {}, r_m(K) = {}",
            pre.threshold,
            show(pre.kernel_range_s),
            show(pre.kernel_range_m)
        )
    })?;
    let start = start_for(params, budget, Proposition::P4)?;
    let o = observe(params, budget, start)?;
    note_family(report, budget, start, &o);
    crash_check(report, &o);
    let h = o.in_h as f64 / o.n_states.max(1) as f64;
    report.check(
        "fraction of time in H below threshold",
        h < budget.h_threshold,
        format!("{h:.5} against {}", budget.h_threshold),
    );
    let (a_bound, b_bound) = pre.quote_bounds.expect("kernel regime has a nonempty kernel");
    report.check(
        "ask and bid stay below the kernel bounds",
        o.bound_violations == 0,
        format!("{} states with a >= {a_bound} or b >= {b_bound}", o.bound_violations),
    );
    report.note("bound_violations", o.bound_violations as f64);
    Ok(())
}

fn verify_p5(params: &MarketParams, budget: &Budget, report: &mut Report) -> Result<(), VerifyError> {
    let pre = stability_preconditions(params);
    require(pre.holds(Regime::SpreadControlled), Proposition::P5, || {
        format!(
            "need r_s(U2) < {} and r_m(V2) > {}; got r_s(U2) = {}, r_m(V2) = {}",
            pre.spread_control_bound,
            pre.threshold,
            show(pre.spread_band_range_s),
            show(pre.mid_band_range_m)
        )
    })?;
    let start = start_for(params, budget, Proposition::P5)?;
    let o = observe(params, budget, start)?;
    note_family(report, budget, start, &o);
    crash_check(report, &o);

    let (lo, hi) = (params.s_lower(), (1.0 + params.alpha()).powi(3) * params.s_lower());
    report.check(
        "spreads strictly inside (s_lower, (1+alpha)^3 s_lower)",
        o.min_spread > lo && o.max_spread < hi,
        format!("observed [{}, {}] against ({lo}, {hi})", o.min_spread, o.max_spread),
    );
    report.check(
        "even-time spreads equal the initial spread",
        o.even_spread_dev <= PAIR_TOLERANCE,
        format!("largest relative deviation {:e}", o.even_spread_dev),
    );
    report.check(
        "eta_{2t} eta_{2t+1} = 1",
        o.eta_pair_dev <= PAIR_TOLERANCE,
        format!("largest deviation {:e} over {} pairs", o.eta_pair_dev, o.n_pairs),
    );
    report.check(
        "eps_t in {+-alpha s/(1+alpha), +-alpha s}",
        o.eps_outside == 0,
        format!("{} of {} pairs outside the set, {} of them zero", o.eps_outside, o.n_pairs, o.eps_zero),
    );
    report.note("pairs", o.n_pairs as f64);
    report.note("eps_outside_set", o.eps_outside as f64);
    report.note("eps_zero", o.eps_zero as f64);
    report.note("exponent_l", pre.exponent_l.unwrap_or(f64::NAN));
    Ok(())
}

fn verify_p6(params: &MarketParams, budget: &Budget, report: &mut Report) -> Result<(), VerifyError> {
    let pre = stability_preconditions(params);
    require(pre.holds(Regime::MidControlled), Proposition::P6, || {
        format!(
            "need r_m(V2) < {} and r_s(U2) > {}; got r_m(V2) = {}, r_s(U2) = {}",
            pre.mid_control_bound,
            pre.threshold,
            show(pre.mid_band_range_m),
            show(pre.spread_band_range_s)
        )
    })?;
    let start = start_for(params, budget, Proposition::P6)?;
    let o = observe(params, budget, start)?;
    note_family(report, budget, start, &o);
    crash_check(report, &o);
    let (m_lo, m_hi) = pre.mid_bounds.expect("set in the mid-controlled regime");
    report.check(
        "mid-prices strictly inside (m_lo, m_hi)",
        o.min_mid > m_lo && o.max_mid < m_hi,
        format!("observed [{}, {}] against ({m_lo}, {m_hi})", o.min_mid, o.max_mid),
    );
    report.note("m_lo", m_lo);
    report.note("m_hi", m_hi);
    Ok(())
}
