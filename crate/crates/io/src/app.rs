//! Argument parsing for the `tradedyn` binary.

use std::fs;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use crate::commands::{run_command, Command, EXIT_CONFIG, EXIT_OK};
use crate::config::parse_config_with;
use tradedyn_core::dynamics::Proposition;

/// Bid-ask dynamics under four trader types: simulation, block algebra and stability checks.
#[derive(Parser)]
#[command(name = "tradedyn", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one trajectory to CSV and a Monte Carlo summary to JSON.
    Simulate,
    /// Replay the configured `word` from the start quote.
    Replay,
    /// List minimal periodic blocks, or classify the configured `word`.
    Blocks,
    /// Limit and market capacities over a spread grid.
    Capacity,
    /// Region labels over a grid of quotes.
    Regions,
    /// Check one of P1, P3, P4, P5, P6.
    Verify { proposition: Proposition },
}

/// Values given here replace those from the configuration file.
#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    s_lower: Option<f64>,
    #[arg(long, global = true)]
    a_upper: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    start_b: Option<f64>,
    #[arg(long, global = true)]
    start_a: Option<f64>,
    #[arg(long, global = true)]
    steps: Option<u64>,
    #[arg(long, global = true)]
    n_traj: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    max_len: Option<usize>,
    #[arg(long, global = true)]
    max_block_len: Option<usize>,
    #[arg(long, global = true)]
    word_len: Option<usize>,
    #[arg(long, global = true)]
    h_threshold: Option<f64>,
    /// Trader types such as "BL BM SL SM".
    #[arg(long, global = true)]
    word: Option<String>,
    #[arg(long, global = true)]
    switch_curve: Option<String>,
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    #[arg(long, global = true)]
    grid_points: Option<usize>,
}

impl Overrides {
    fn into_table(self) -> toml::Table {
        use toml::Value;
        let mut t = toml::Table::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                t.insert(k.to_string(), v);
            }
        };
        let float = |x: Option<f64>| x.map(Value::Float);
        let int = |x: Option<u64>| x.map(|x| Value::Integer(x as i64));
        let size = |x: Option<usize>| x.map(|x| Value::Integer(x as i64));
        let text = |x: Option<String>| x.map(Value::String);
        let path = |x: Option<PathBuf>| x.map(|p| Value::String(p.to_string_lossy().into_owned()));
        put("alpha", text(self.alpha));
        put("s_lower", float(self.s_lower));
        put("a_upper", float(self.a_upper));
        put("gamma", float(self.gamma));
        put("delta", float(self.delta));
        put("epsilon", float(self.epsilon));
        put("start_b", float(self.start_b));
        put("start_a", float(self.start_a));
        put("steps", int(self.steps));
        put("n_traj", int(self.n_traj));
        put("seed", int(self.seed));
        put("max_len", size(self.max_len));
        put("max_block_len", size(self.max_block_len));
        put("word_len", size(self.word_len));
        put("h_threshold", float(self.h_threshold));
        put("word", text(self.word));
        put("switch_curve", text(self.switch_curve));
        put("output", path(self.output));
        put("summary", path(self.summary));
        put("grid_points", size(self.grid_points));
        t
    }
}

/// Parse `args` (program name first), run the command and return the exit
/// code. Tables go to `out`, diagnostics and summaries without a path to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    let text = match &cli.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        },
        None => String::new(),
    };
    let config = match parse_config_with(&text, &cli.overrides.into_table()) {
        Ok(c) => c,
        Err(e) => {
            let place = cli.config.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default();
            let _ = writeln!(err, "error: {place}{e}");
            return EXIT_CONFIG;
        }
    };
    let cmd = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Replay => Command::Replay,
        Cmd::Blocks => Command::Blocks,
        Cmd::Capacity => Command::Capacity,
        Cmd::Regions => Command::Regions,
        Cmd::Verify { proposition } => Command::Verify(proposition),
    };
    let code = match run_command(cmd, &config, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {cmd}: {e}");
            e.exit_code()
        }
    };
    let _ = out.flush();
    code
}
