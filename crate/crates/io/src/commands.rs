use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;
use tradedyn_core::blocks::{block_report, format_word};
use tradedyn_core::dynamics::{
    monte_carlo, regime_start, replay, simulate, verify_proposition, Budget, Proposition, VerifyError,
};
use tradedyn_core::{
    enumerate_minimal_blocks, limit_capacity, market_capacity, region_labels, region_polygon,
    stability_preconditions, Quote, Region, SwitchError, SwitchingLaw,
};

use crate::config::RunConfig;
use crate::output::{emit, format_price, write_summary, write_trajectory, OutputError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Replay,
    Blocks,
    Capacity,
    Regions,
    Verify(Proposition),
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Simulate => f.write_str("simulate"),
            Command::Replay => f.write_str("replay"),
            Command::Blocks => f.write_str("blocks"),
            Command::Capacity => f.write_str("capacity"),
            Command::Regions => f.write_str("regions"),
            Command::Verify(p) => write!(f, "verify {p}"),
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let cmd = match parts.next() {
            Some("simulate") => Command::Simulate,
            Some("replay") => Command::Replay,
            Some("blocks") => Command::Blocks,
            Some("capacity") => Command::Capacity,
            Some("regions") => Command::Regions,
            Some("verify") => Command::Verify(parts.next().ok_or("verify needs a proposition")?.parse()?),
            _ => return Err(format!("unknown command {s:?}")),
        };
        match parts.next() {
            None => Ok(cmd),
            Some(extra) => Err(format!("unexpected argument {extra:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl From<SwitchError> for CommandError {
    fn from(e: SwitchError) -> Self {
        CommandError::Config(e.to_string())
    }
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

fn start_quote(config: &RunConfig) -> Result<Quote, CommandError> {
    config.start.or_else(|| regime_start(&config.params)).ok_or_else(|| {
        CommandError::Config("no start_b/start_a given and the band centres do not fit in the domain".into())
    })
}

/// Run `cmd`; tables and reports without a configured path go to `out`,
/// progress notes to `log`. Returns the process exit code.
pub fn run_command(
    cmd: Command,
    config: &RunConfig,
    out: &mut dyn Write,
    log: &mut dyn Write,
) -> Result<i32, CommandError> {
    match cmd {
        Command::Simulate => simulate_cmd(config, out, log),
        Command::Replay => replay_cmd(config, out),
        Command::Blocks => blocks_cmd(config, out),
        Command::Capacity => capacity_cmd(config, out),
        Command::Regions => regions_cmd(config, out),
        Command::Verify(p) => verify_cmd(config, p, out),
    }
}

fn simulate_cmd(config: &RunConfig, out: &mut dyn Write, log: &mut dyn Write) -> Result<i32, CommandError> {
    let law = SwitchingLaw::new(config.params, config.switch_curve)?;
    let start = start_quote(config)?;
    let traj = simulate(start, config.steps, &law, config.seed).map_err(|e| CommandError::Config(e.to_string()))?;
    emit(config.output.as_deref(), out, |w| write_trajectory(&traj, w))?;

    let summary = monte_carlo(start, config.steps, config.n_traj, &law, config.seed)
        .map_err(|e| CommandError::Config(e.to_string()))?;
    match &config.summary {
        Some(path) => emit(Some(path), out, |w| write_summary(&summary, w))?,
        None => write_summary(&summary, &mut *log)?,
    }
    Ok(EXIT_OK)
}

fn replay_cmd(config: &RunConfig, out: &mut dyn Write) -> Result<i32, CommandError> {
    let word = config.word.as_ref().ok_or_else(|| CommandError::Config("replay needs a `word`".into()))?;
    let start = start_quote(config)?;
    let traj = replay(start, word, &config.params).map_err(|e| CommandError::Config(e.to_string()))?;
    emit(config.output.as_deref(), out, |w| write_trajectory(&traj, w))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct WordReport {
    word: String,
    periodic: bool,
    minimal: bool,
    product: [[String; 2]; 2],
    reduction: String,
}

fn blocks_cmd(config: &RunConfig, out: &mut dyn Write) -> Result<i32, CommandError> {
    let alpha = &config.alpha_exact;
    if let Some(word) = &config.word {
        let r = block_report(word, alpha, config.max_block_len);
        let report = WordReport {
            word: format_word(word),
            periodic: r.is_periodic,
            minimal: r.is_minimal,
            product: r.product.rows.map(|row| row.map(|x| x.to_string())),
            reduction: format_word(&r.reduction),
        };
        emit(config.output.as_deref(), out, |w| write_summary(&report, w))?;
        return Ok(EXIT_OK);
    }
    let blocks = enumerate_minimal_blocks(alpha, config.max_len);
    emit(config.output.as_deref(), out, |w| {
        writeln!(w, "# minimal periodic blocks, alpha = {alpha}, length <= {}: {}", config.max_len, blocks.len())?;
        for b in &blocks {
            writeln!(w, "{}\t{}", b.len(), format_word(b))?;
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

/// `n` points from `lo` to `hi`, evenly spaced in the logarithm.
fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo * (hi / lo).powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

fn capacity_cmd(config: &RunConfig, out: &mut dyn Write) -> Result<i32, CommandError> {
    let p = &config.params;
    let grid = log_grid(p.s_lower(), p.a_upper(), config.grid_points);
    emit(config.output.as_deref(), out, |w| {
        writeln!(w, "s,z,y")?;
        for s in grid {
            let z = limit_capacity(s, p).expect("grid stays in range");
            let y = market_capacity(s, p).expect("grid stays in range");
            writeln!(w, "{},{z},{y}", format_price(s))?;
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RegionSummary {
    kernel: Vec<[f64; 2]>,
    spread_band: Vec<[f64; 2]>,
    mid_band: Vec<[f64; 2]>,
    stability: tradedyn_core::StabilityReport,
}

fn regions_cmd(config: &RunConfig, out: &mut dyn Write) -> Result<i32, CommandError> {
    let p = &config.params;
    let n = config.grid_points;
    let (s_lower, a_upper) = (p.s_lower(), p.a_upper());
    emit(config.output.as_deref(), out, |w| {
        writeln!(w, "b,a,s,m,in_WM,in_WL,in_WB,in_WS,in_H,in_K")?;
        // rows of constant b, each running from the minimum spread up to a = a_upper
        for i in 0..n {
            let b = (a_upper - s_lower) * i as f64 / (n - 1) as f64;
            for j in 0..(n - i) {
                let a = if n - i == 1 {
                    a_upper
                } else {
                    b + s_lower + (a_upper - s_lower - b) * j as f64 / (n - i - 1) as f64
                };
                let q = Quote::new(b, a);
                let l = region_labels(&q, p);
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    format_price(b),
                    format_price(a),
                    format_price(q.spread()),
                    format_price(q.mid()),
                    l.in_wm,
                    l.in_wl,
                    l.in_wb,
                    l.in_ws,
                    l.in_h,
                    l.in_k
                )?;
            }
        }
        Ok(())
    })?;
    if let Some(path) = &config.summary {
        let summary = RegionSummary {
            kernel: region_polygon(p, Region::Kernel).vertices,
            spread_band: region_polygon(p, Region::SpreadBand).vertices,
            mid_band: region_polygon(p, Region::MidBand).vertices,
            stability: stability_preconditions(p),
        };
        emit(Some(path), out, |w| write_summary(&summary, w))?;
    }
    Ok(EXIT_OK)
}

fn verify_cmd(config: &RunConfig, which: Proposition, out: &mut dyn Write) -> Result<i32, CommandError> {
    let budget = Budget {
        n_traj: config.n_traj,
        steps: config.steps,
        seed: config.seed,
        start: config.start,
        h_threshold: config.h_threshold,
        word_len: config.word_len,
        curve: config.switch_curve,
        ..Budget::default()
    };
    // refusing to run on unmet preconditions is a configuration problem
    let report = verify_proposition(&config.params, which, &budget)
        .map_err(|e: VerifyError| CommandError::Config(e.to_string()))?;
    emit(config.summary.as_deref(), out, |w| write_summary(&report, w))?;
    Ok(if report.passed { EXIT_OK } else { EXIT_ASSERTION })
}
