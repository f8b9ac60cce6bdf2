//! Flat TOML run configuration.
//!
//! ```toml
//! alpha = "1/2"        # number or exact "p/q" string
//! s_lower = 1.0
//! a_upper = 100.0
//! gamma = 0.9
//! delta = 1.0
//! epsilon = 0.5
//! start_b = 10.0       # optional; band centres when absent
//! start_a = 12.0
//! steps = 10000
//! seed = 7
//! ```
//!
//! Keys not listed in [`KEYS`] are rejected.

use std::path::PathBuf;

use num_rational::BigRational;
use serde::Deserialize;
use thiserror::Error;
use tradedyn_core::{parse_ratio, MarketParams, ParamsError, Quote, SwitchCurve, TraderType};

/// Every accepted key.
pub const KEYS: [&str; 20] = [
    "alpha",
    "s_lower",
    "a_upper",
    "gamma",
    "delta",
    "epsilon",
    "start_b",
    "start_a",
    "steps",
    "n_traj",
    "seed",
    "max_len",
    "max_block_len",
    "word_len",
    "h_threshold",
    "word",
    "switch_curve",
    "output",
    "summary",
    "grid_points",
];

pub const DEFAULT_STEPS: u64 = 10_000;
pub const DEFAULT_N_TRAJ: u64 = 200;
pub const DEFAULT_MAX_LEN: usize = 10;
pub const DEFAULT_MAX_BLOCK_LEN: usize = 64;
pub const DEFAULT_WORD_LEN: usize = 64;
pub const DEFAULT_H_THRESHOLD: f64 = 0.05;
pub const DEFAULT_GRID_POINTS: usize = 21;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("unknown key `{0}`")]
    UnknownOverride(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: MarketParams,
    /// `alpha` as an exact rational, for the block algebra.
    pub alpha_exact: BigRational,
    pub start: Option<Quote>,
    pub steps: u64,
    pub n_traj: u64,
    pub seed: u64,
    /// Longest block searched for by `blocks`.
    pub max_len: usize,
    /// Longest block deleted when reducing a word.
    pub max_block_len: usize,
    /// Word length sampled when checking reducibility.
    pub word_len: usize,
    pub h_threshold: f64,
    pub word: Option<Vec<TraderType>>,
    pub switch_curve: SwitchCurve,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub grid_points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AlphaValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    alpha: AlphaValue,
    s_lower: f64,
    a_upper: f64,
    gamma: f64,
    delta: f64,
    epsilon: f64,
    start_b: Option<f64>,
    start_a: Option<f64>,
    steps: Option<u64>,
    n_traj: Option<u64>,
    seed: Option<u64>,
    max_len: Option<usize>,
    max_block_len: Option<usize>,
    word_len: Option<usize>,
    h_threshold: Option<f64>,
    word: Option<String>,
    switch_curve: Option<String>,
    output: Option<PathBuf>,
    summary: Option<PathBuf>,
    grid_points: Option<usize>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn key_line(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| l.trim_start().strip_prefix(key).is_some_and(|r| r.trim_start().starts_with('=')))
        .map_or(0, |i| i + 1)
}

/// Parse a whitespace- or comma-separated word such as `BL BM SL SM`.
pub fn parse_word(text: &str) -> Result<Vec<TraderType>, ConfigError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<TraderType>().map_err(|e| ConfigError::Invalid(e.to_string())))
        .collect()
}

fn exact_alpha(value: &AlphaValue) -> Result<(f64, BigRational), ConfigError> {
    let text = match value {
        // the shortest decimal that round-trips, so 0.1 means 1/10
        AlphaValue::Number(x) => x.to_string(),
        AlphaValue::Text(t) => t.clone(),
    };
    let exact = parse_ratio(&text).map_err(|e| ConfigError::Invalid(format!("alpha: {e}")))?;
    let approx = match value {
        AlphaValue::Number(x) => *x,
        AlphaValue::Text(_) => tradedyn_core::Scalar::approx(&exact),
    };
    Ok((approx, exact))
}

/// Parse a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &toml::Table::new())
}

/// Parse a configuration file with `overrides` taking precedence over the
/// file's values.
pub fn parse_config_with(text: &str, overrides: &toml::Table) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    for key in table.keys() {
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line: key_line(text, key), key: key.clone() });
        }
    }
    for (key, value) in overrides {
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownOverride(key.clone()));
        }
        table.insert(key.clone(), value.clone());
    }
    let raw: RawConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| {
        ConfigError::Invalid(e.message().trim().to_string())
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let (alpha, alpha_exact) = exact_alpha(&raw.alpha)?;
    let params = MarketParams::new(alpha, raw.s_lower, raw.a_upper, raw.gamma, raw.delta, raw.epsilon)?;

    let start = match (raw.start_b, raw.start_a) {
        (Some(b), Some(a)) => {
            let q = Quote::new(b, a);
            if !params.domain().contains(&q) {
                return Err(ConfigError::Invalid(format!(
                    "start quote (b = {b}, a = {a}) violates b >= 0, a <= a_upper or a - b >= s_lower"
                )));
            }
            Some(q)
        }
        (None, None) => None,
        _ => return Err(ConfigError::Invalid("start_b and start_a must be given together".into())),
    };

    let h_threshold = raw.h_threshold.unwrap_or(DEFAULT_H_THRESHOLD);
    if !(h_threshold > 0.0 && h_threshold <= 1.0) {
        return Err(ConfigError::Invalid(format!("h_threshold = {h_threshold} must lie in (0, 1]")));
    }
    let grid_points = raw.grid_points.unwrap_or(DEFAULT_GRID_POINTS);
    if grid_points < 2 {
        return Err(ConfigError::Invalid(format!("grid_points = {grid_points} must be at least 2")));
    }
    let max_block_len = raw.max_block_len.unwrap_or(DEFAULT_MAX_BLOCK_LEN);
    if max_block_len < 2 {
        return Err(ConfigError::Invalid(format!("max_block_len = {max_block_len} must be at least 2")));
    }
    let switch_curve = match raw.switch_curve {
        Some(name) => name.parse().map_err(ConfigError::Invalid)?,
        None => SwitchCurve::default(),
    };

    Ok(RunConfig {
        params,
        alpha_exact,
        start,
        steps: raw.steps.unwrap_or(DEFAULT_STEPS),
        n_traj: raw.n_traj.unwrap_or(DEFAULT_N_TRAJ),
        seed: raw.seed.unwrap_or(0),
        max_len: raw.max_len.unwrap_or(DEFAULT_MAX_LEN),
        max_block_len,
        word_len: raw.word_len.unwrap_or(DEFAULT_WORD_LEN),
        h_threshold,
        word: raw.word.as_deref().map(parse_word).transpose()?,
        switch_curve,
        output: raw.output,
        summary: raw.summary,
        grid_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tradedyn_core::ratio;

    const MINIMAL: &str = "alpha = 0.5\ns_lower = 1.0\na_upper = 100.0\ngamma = 0.9\ndelta = 1.0\nepsilon = 0.5\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.alpha_exact, ratio(1, 2));
        assert_eq!(c.steps, DEFAULT_STEPS);
        assert_eq!(c.n_traj, DEFAULT_N_TRAJ);
        assert_eq!(c.seed, 0);
        assert_eq!(c.start, None);
        assert_eq!(c.switch_curve, SwitchCurve::LogLinear);
        assert_eq!(c.word, None);
    }

    #[test]
    fn alpha_out_of_range_is_a_validation_error() {
        let text = MINIMAL.replace("alpha = 0.5", "alpha = 1.5");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Params(_)));
        assert!(err.to_string().contains("alpha"));
    }

    #[test]
    fn unknown_key_is_named_with_its_line() {
        let text = format!("{MINIMAL}colour = \"red\"\n");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::UnknownKey { line: 7, key } if key == "colour"), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = format!("{MINIMAL}steps = = 3\n");
        match parse_config(&text).unwrap_err() {
            ConfigError::Parse { line, .. } => assert_eq!(line, 7),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn exact_alpha_strings() {
        let c = parse_config(&MINIMAL.replace("alpha = 0.5", "alpha = \"1/3\"")).unwrap();
        assert_eq!(c.alpha_exact, ratio(1, 3));
        assert!((c.params.alpha() - 1.0 / 3.0).abs() < 1e-15);
        let c = parse_config(&MINIMAL.replace("alpha = 0.5", "alpha = 0.7")).unwrap();
        assert_eq!(c.alpha_exact, ratio(7, 10));
    }

    #[test]
    fn overrides_win() {
        let mut o = toml::Table::new();
        o.insert("seed".into(), toml::Value::Integer(9));
        o.insert("word".into(), toml::Value::String("BL, SM".into()));
        let c = parse_config_with(&format!("{MINIMAL}seed = 3\n"), &o).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.word, Some(vec![TraderType::BuyLimit, TraderType::SellMarket]));
        o.insert("bogus".into(), toml::Value::Integer(1));
        assert!(matches!(parse_config_with(MINIMAL, &o), Err(ConfigError::UnknownOverride(_))));
    }

    #[test]
    fn start_must_be_in_the_domain() {
        let text = format!("{MINIMAL}start_b = 10.0\nstart_a = 10.5\n");
        assert!(matches!(parse_config(&text), Err(ConfigError::Invalid(_))));
        let text = format!("{MINIMAL}start_b = 10.0\n");
        assert!(matches!(parse_config(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn missing_required_key() {
        let text = MINIMAL.replace("gamma = 0.9\n", "");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }

    #[test]
    fn negative_steps_rejected() {
        let text = format!("{MINIMAL}steps = -4\n");
        assert!(parse_config(&text).is_err());
    }
}
