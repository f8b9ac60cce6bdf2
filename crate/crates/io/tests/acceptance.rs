//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Runs without the libtest harness so the
//! lines always appear, in order.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::Rng;
use tradedyn_core::dynamics::{
    derived_processes, eps_value_set, monte_carlo, regime_start, replay_constant, replay_exact, simulate_stream,
    trajectory_rng,
};
use tradedyn_core::stability::{kernel_quote_bounds, mid_controlled_bounds};
use tradedyn_core::{
    atomic_matrix, enumerate_minimal_blocks, is_minimal_periodic_block, is_periodic_block, limit_capacity,
    market_capacity, ratio, reduce_sequence, region_polygon, AtomicMap, Domain, MarketParams, Quote, Region,
    SwitchCurve, SwitchingLaw, TraderType,
};
use TraderType::*;

/// Closed-form crash points are matched to this absolute distance.
const CRASH_POINT_TOL: f64 = 1e-12;
/// Float ratio tracking of spreads and eta products over long runs.
const RATIO_TOL: f64 = 1e-9;
/// Distance of an eps value to the nearest member of its value set.
const EPS_TOL: f64 = 1e-9;
/// Fraction of visited states allowed in the buffering region.
const H_OCCUPANCY_MAX: f64 = 0.05;

const N_TRAJ: u64 = 200;
const STEPS: u64 = 100_000;
const SEED: u64 = 0;

/// Id, name, time limit in seconds and check.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn params(alpha: f64, s_lower: f64, a_upper: f64, gamma: f64, delta: f64, epsilon: f64) -> MarketParams {
    MarketParams::new(alpha, s_lower, a_upper, gamma, delta, epsilon).expect("valid parameters")
}

fn law(p: MarketParams) -> SwitchingLaw {
    SwitchingLaw::new(p, SwitchCurve::LogLinear).expect("non-degenerate switching bands")
}

fn identities() -> Outcome {
    let mut bad = Vec::new();
    for (n, d) in [(1, 2), (1, 3), (1, 4), (7, 10)] {
        let alpha = ratio(n, d);
        let s = |ty| atomic_matrix::<BigRational>(ty, &alpha);
        let products = [
            ("S1S4", s(BuyLimit).then_after(&s(SellMarket))),
            ("S4S1", s(SellMarket).then_after(&s(BuyLimit))),
            ("S2S3", s(BuyMarket).then_after(&s(SellLimit))),
            ("S3S2", s(SellLimit).then_after(&s(BuyMarket))),
        ];
        for (name, m) in products {
            if m != AtomicMap::identity() {
                bad.push(format!("{name} != I at alpha = {n}/{d}"));
            }
        }
    }
    Outcome::new(bad.is_empty(), if bad.is_empty() { "16 products equal I exactly".into() } else { bad.join("; ") })
}

fn printed_blocks() -> Outcome {
    let ten = [BuyMarket, BuyLimit, BuyMarket, BuyLimit, SellLimit, SellMarket, SellLimit, SellMarket, SellLimit, SellMarket];
    let mut fourteen = [BuyLimit, BuyMarket].repeat(4);
    fourteen.extend([SellMarket, SellLimit].repeat(3));
    let four = [BuyLimit, BuyMarket, SellLimit, SellMarket];
    let (half, third) = (ratio(1, 2), ratio(1, 3));

    let ten_ok = is_minimal_periodic_block(&ten, &half) == Ok(true);
    let fourteen_ok = is_minimal_periodic_block(&fourteen, &third) == Ok(true);
    let four_periodic = is_periodic_block(&four, &half);
    let four_minimal = is_minimal_periodic_block(&four, &half) == Ok(true);
    Outcome::new(
        ten_ok && fourteen_ok && four_periodic && !four_minimal,
        format!(
            "10-block minimal at 1/2: {ten_ok}; 14-block minimal at 1/3: {fourteen_ok}; \
             BL BM SL SM periodic: {four_periodic}, minimal: {four_minimal}"
        ),
    )
}

fn even_block_lengths() -> Outcome {
    let pairs = [[BuyLimit, SellMarket], [SellMarket, BuyLimit], [BuyMarket, SellLimit], [SellLimit, BuyMarket]];
    let mut passed = true;
    let mut parts = Vec::new();
    for (n, d) in [(1, 2), (1, 3), (1, 4)] {
        let blocks = enumerate_minimal_blocks(&ratio(n, d), 10);
        let odd = blocks.iter().filter(|b| b.len() % 2 == 1).count();
        let has_pairs = pairs.iter().all(|p| blocks.iter().any(|b| b.as_slice() == p));
        let longest = blocks.iter().map(Vec::len).max().unwrap_or(0);
        passed &= odd == 0 && has_pairs;
        parts.push(format!("alpha {n}/{d}: {} blocks, {odd} odd, longest {longest}, length-2 pairs {has_pairs}", blocks.len()));
    }
    Outcome::new(passed, parts.join("; "))
}

fn constant_type_crashes() -> Outcome {
    let p = params(0.5, 1.0, 100.0, 0.9, 1.0, 0.5);
    let (s_lower, a_upper) = (p.s_lower(), p.a_upper());
    let mut rng = trajectory_rng(SEED, 4);
    let mut worst = 0.0f64;
    let mut longest = 0u64;
    let mut failures = 0;
    for _ in 0..100 {
        let start = loop {
            let (b, a) = (rng.gen_range(0.0..a_upper), rng.gen_range(0.0..a_upper));
            if b > 0.0 && a < a_upper && a - b > s_lower {
                break Quote::new(b, a);
            }
        };
        for ty in TraderType::ALL {
            let (b, a) = (start.b, start.a);
            let expected = match ty {
                BuyLimit => Quote::new(a - s_lower, a),
                BuyMarket => Quote::new(b, a_upper),
                SellLimit => Quote::new(b, b + s_lower),
                SellMarket => Quote::new(0.0, a),
            };
            let traj = replay_constant(start, ty, &p, 10_000).expect("start lies in W");
            match traj.crash {
                Some(c) => {
                    worst = worst.max((c.quote.b - expected.b).abs()).max((c.quote.a - expected.a).abs());
                    longest = longest.max(c.t);
                }
                None => failures += 1,
            }
        }
    }
    Outcome::new(
        failures == 0 && worst <= CRASH_POINT_TOL,
        format!("400 replays, {failures} without a crash, max crash time {longest}, max error {worst:.1e} (tol {CRASH_POINT_TOL:.0e})"),
    )
}

/// z by dividing until the spread would fall below `s_lower`.
fn limit_oracle(s: f64, alpha: f64, s_lower: f64) -> u32 {
    let (mut x, mut z) = (s, 0);
    loop {
        x /= 1.0 + alpha;
        if x < s_lower {
            return z;
        }
        z += 1;
    }
}

/// y by multiplying while the spread stays at or below `(1-gamma) a_upper`.
fn market_oracle(s: f64, alpha: f64, ceiling: f64) -> u32 {
    let (mut x, mut y) = (s, 0);
    while x <= ceiling {
        y += 1;
        x *= 1.0 + alpha;
    }
    y
}

fn capacity_laws() -> Outcome {
    let configs = [
        params(0.5, 1.0, 100.0, 0.9, 1.0, 0.5),
        params(1.0 / 3.0, 0.5, 80.0, 0.8, 1.0, 0.5),
        params(0.7, 2.0, 500.0, 0.95, 1.0, 0.5),
        params(0.1, 1.0, 1000.0, 0.5, 1.0, 0.5),
    ];
    let mut rng = trajectory_rng(SEED, 5);
    let mut mismatches = 0;
    for i in 0..10_000 {
        let p = &configs[i % configs.len()];
        let (lo, hi) = (p.s_lower(), p.a_upper());
        let s = lo * (hi / lo).powf(rng.gen::<f64>());
        let z = limit_capacity(s, p).expect("spread in range");
        let y = market_capacity(s, p).expect("spread in range");
        let ceiling = (1.0 - p.gamma()) * hi;
        if z != limit_oracle(s, p.alpha(), lo) || y != market_oracle(s, p.alpha(), ceiling) {
            mismatches += 1;
        }
    }
    Outcome::new(mismatches == 0, format!("10^4 log-uniform spreads over 4 configurations, {mismatches} mismatches"))
}

fn kernel_stability() -> Outcome {
    let p = params(0.5, 1.0, 100.0, 0.9, 1.0, 0.5);
    let k = region_polygon(&p, Region::Kernel);
    let (rs, rm) = (k.range_s().unwrap_or(f64::NAN), k.range_m().unwrap_or(f64::NAN));
    let (a_bound, b_bound) = kernel_quote_bounds(&p).unwrap_or((f64::NAN, f64::NAN));
    let s = monte_carlo(Quote::new(10.0, 12.0), STEPS, N_TRAJ, &law(p), SEED).expect("start lies in W");
    let violations = s.bound_violations;
    let bounds_ok = (a_bound, b_bound) == (55.0, 50.75);
    Outcome::new(
        bounds_ok && s.n_crashes == 0 && s.fraction_time_in_h < H_OCCUPANCY_MAX && violations == 0,
        format!(
            "r_s(K) = {rs}, r_m(K) = {rm}, bounds a < {a_bound}, b < {b_bound}; {} of {} trajectories crash \
             (mean crash time {}), H-occupancy {:.4} (max {H_OCCUPANCY_MAX}), {violations} bound violations",
            s.n_crashes,
            s.n_trajectories,
            s.mean_crash_time.map_or("-".into(), |t| format!("{t:.1}")),
            s.fraction_time_in_h,
        ),
    )
}

fn spread_regime() -> Outcome {
    // delta and epsilon are free here; these satisfy every precondition of the regime
    let p = params(0.5, 1.0, 20.0, 0.9, 3.0, 0.75);
    let law = law(p);
    let start = regime_start(&p).expect("band centres lie in W");
    let (s_lo, s_hi) = (p.s_lower(), (1.0 + p.alpha()).powi(3) * p.s_lower());
    let s0 = start.spread();

    let mut crashes = 0;
    let (mut outside_band, mut even_dev, mut eta_dev) = (0u64, 0.0f64, 0.0f64);
    let (mut eps_total, mut eps_outside, mut eps_outside_zero) = (0u64, 0u64, 0u64);
    for i in 0..N_TRAJ {
        let traj = simulate_stream(start, STEPS, &law, SEED, i).expect("start lies in W");
        let d = match derived_processes(&traj) {
            Ok(d) => d,
            Err(_) => {
                crashes += 1;
                continue;
            }
        };
        outside_band += traj.steps.iter().filter(|s| !(s.quote.spread() > s_lo && s.quote.spread() < s_hi)).count() as u64;
        for (_, q) in &d.even_states {
            even_dev = even_dev.max((q.spread() / s0 - 1.0).abs());
        }
        for prod in d.eta_pair_products() {
            eta_dev = eta_dev.max((prod - 1.0).abs());
        }
        for (eps, (_, q)) in d.eps.iter().zip(&d.even_states) {
            eps_total += 1;
            let set = eps_value_set(p.alpha(), q.spread());
            if !set.iter().any(|v| (eps - v).abs() <= EPS_TOL) {
                eps_outside += 1;
                eps_outside_zero += (eps.abs() <= EPS_TOL) as u64;
            }
        }
    }
    let spreads_ok = crashes == 0 && outside_band == 0;
    let even_ok = crashes == 0 && even_dev <= RATIO_TOL;
    let eta_ok = crashes == 0 && eta_dev <= RATIO_TOL;
    let eps_ok = crashes == 0 && eps_outside == 0;
    Outcome::new(
        spreads_ok && even_ok && eta_ok && eps_ok,
        format!(
            "start ({:.4}, {:.4}); {crashes} crashes; spreads in ({s_lo}, {s_hi}): {spreads_ok} ({outside_band} outside); \
             even-time spreads: {even_ok} (max rel dev {even_dev:.1e}); eta pairs: {eta_ok} (max dev {eta_dev:.1e}); \
             eps in value set: {eps_ok} ({eps_outside} of {eps_total} outside, {eps_outside_zero} of them zero)",
            start.b, start.a
        ),
    )
}

fn mid_regime() -> Outcome {
    let p = params(0.5, 1.0, 100.0, 0.9, 1.0, 0.987);
    let (m_lo, m_hi) = mid_controlled_bounds(&p);
    let start = match regime_start(&p) {
        Some(q) => q,
        None => return Outcome::new(false, "no start quote at the band centres"),
    };
    let s = monte_carlo(start, STEPS, N_TRAJ, &law(p), SEED).expect("start lies in W");
    let mids_ok = s.min_mid.is_some_and(|m| m > m_lo) && s.max_mid.is_some_and(|m| m < m_hi);
    Outcome::new(
        s.n_crashes == 0 && mids_ok,
        format!(
            "start ({:.4}, {:.4}); {} of {} trajectories crash (mean crash time {}); mids [{}, {}] inside ({m_lo:.4}, {m_hi:.4}): {mids_ok}",
            start.b,
            start.a,
            s.n_crashes,
            s.n_trajectories,
            s.mean_crash_time.map_or("-".into(), |t| format!("{t:.1}")),
            s.min_mid.map_or("-".into(), |m| format!("{m:.4}")),
            s.max_mid.map_or("-".into(), |m| format!("{m:.4}")),
        ),
    )
}

fn reduction_equivalence() -> Outcome {
    let mut rng = trajectory_rng(SEED, 9);
    let (mut accepted, mut rejected, mut mismatches, mut shortened, mut removed) = (0, 0u64, 0, 0, 0usize);
    for (n, d) in [(1, 2), (1, 3)] {
        let alpha = ratio(n, d);
        let domain = Domain::new(alpha.clone(), ratio(1, 1), ratio(1_000_000_000_000, 1)).expect("valid domain");
        // spread 10^6 sits about 34 growth factors from either spread edge
        let start = Quote::new(ratio(100_000_000_000, 1), ratio(100_001_000_000, 1));
        let mut done = 0;
        while done < 500 {
            let word: Vec<TraderType> = (0..50).map(|_| TraderType::ALL[rng.gen_range(0..4)]).collect();
            let full = replay_exact(&domain, &start, &word).expect("start lies in W");
            if full.clipped {
                rejected += 1;
                continue;
            }
            let reduced = reduce_sequence(&word, &alpha, word.len());
            let short = replay_exact(&domain, &start, &reduced).expect("start lies in W");
            if short.clipped || short.end != full.end {
                mismatches += 1;
            }
            shortened += (reduced.len() < word.len()) as usize;
            removed += word.len() - reduced.len();
            done += 1;
            accepted += 1;
        }
    }
    Outcome::new(
        mismatches == 0 && accepted == 1000,
        format!(
            "{accepted} clip-free words ({rejected} clipped words redrawn), {shortened} shortened, \
             mean reduction {:.1} letters, {mismatches} endpoint mismatches",
            removed as f64 / accepted as f64
        ),
    )
}

fn reproducibility() -> Outcome {
    let dir = std::env::temp_dir().join(format!("tradedyn-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("temp dir");
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        "alpha = \"1/2\"\ns_lower = 1.0\na_upper = 20.0\ngamma = 0.9\ndelta = 3.0\nepsilon = 0.75\nsteps = 10000\nseed = 11\n",
    )
    .expect("write config");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let csv = dir.join(format!("run{run}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_tradedyn"))
            .args(["simulate", "-c"])
            .arg(&cfg)
            .arg("-o")
            .arg(&csv)
            .arg("--summary")
            .arg(dir.join(format!("run{run}.json")))
            .status()
            .expect("spawn tradedyn");
        if !status.success() {
            return Outcome::new(false, format!("run {run} exited with {status}"));
        }
        outputs.push(fs::read(&csv).expect("read csv"));
    }
    let _ = fs::remove_dir_all(&dir);
    let rows = outputs[0].iter().filter(|&&c| c == b'\n').count();
    Outcome::new(
        outputs[0] == outputs[1] && rows > 1,
        format!("{} bytes, {rows} lines, identical: {}", outputs[0].len(), outputs[0] == outputs[1]),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "inverse pairs multiply to the identity", 1, identities),
        (2, "printed blocks are periodic and minimal", 1, printed_blocks),
        (3, "minimal blocks up to length 10 have even length", 60, even_block_lengths),
        (4, "constant-type replays crash at closed-form points", 5, constant_type_crashes),
        (5, "capacity laws match brute-force oracles", 5, capacity_laws),
        (6, "kernel stability from (10, 12)", 120, kernel_stability),
        (7, "spread-controlled regime", 120, spread_regime),
        (8, "mid-controlled regime", 120, mid_regime),
        (9, "reduction preserves replay endpoints", 30, reduction_equivalence),
        (10, "simulate output is byte-reproducible", 10, reproducibility),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let t0 = Instant::now();
        let outcome = run();
        let elapsed = t0.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let passed = outcome.passed && in_time;
        let timing = format!("{:.2} s of {limit} s{}", elapsed.as_secs_f64(), if in_time { "" } else { ", too slow" });
        println!("{} {id:>2} {name} [{timing}]: {}", if passed { "PASS" } else { "FAIL" }, outcome.detail);
        if !passed {
            failed.push(id);
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
