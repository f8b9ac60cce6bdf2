//! CSV and JSON writers.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;
use tradedyn_core::dynamics::Trajectory;

pub const TRAJECTORY_HEADER: [&str; 8] = ["t", "b", "a", "s", "m", "type", "in_K", "crashed"];

/// Significant digits of every price written to CSV.
pub const PRICE_DIGITS: i32 = 12;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot write output: {0}")]
    Stream(#[from] io::Error),
    #[error("cannot encode output: {0}")]
    Encode(String),
}

/// Decimal with [`PRICE_DIGITS`] significant digits, trailing zeros removed.
pub fn format_price(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (PRICE_DIGITS - 1 - magnitude).clamp(0, 40) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Trajectory as CSV with columns `t,b,a,s,m,type,in_K,crashed`. The type
/// column is empty at `t = 0`; only a final clipped row has `crashed = true`.
pub fn write_trajectory<W: Write>(traj: &Trajectory, out: W) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    let encode = |e: csv::Error| OutputError::Encode(e.to_string());
    w.write_record(TRAJECTORY_HEADER).map_err(encode)?;
    let crash_t = traj.crash.map(|c| c.t);
    for step in &traj.steps {
        let q = step.quote;
        w.write_record([
            step.t.to_string(),
            format_price(q.b),
            format_price(q.a),
            format_price(q.spread()),
            format_price(q.mid()),
            step.trader.map(|t| t.label().to_string()).unwrap_or_default(),
            step.labels.in_k.to_string(),
            (crash_t == Some(step.t)).to_string(),
        ])
        .map_err(encode)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_summary<T: Serialize, W: Write>(summary: &T, mut out: W) -> Result<(), OutputError> {
    serde_json::to_writer_pretty(&mut out, summary).map_err(|e| OutputError::Encode(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Write to `path`, or to `fallback` when no path is set.
pub fn emit(
    path: Option<&Path>,
    fallback: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> Result<(), OutputError>,
) -> Result<(), OutputError> {
    match path {
        Some(p) => {
            let io = |source| OutputError::Io { path: p.to_path_buf(), source };
            let mut buf = Vec::new();
            write(&mut buf)?;
            fs::write(p, buf).map_err(io)
        }
        None => write(fallback),
    }
}
