//! Command-line front end.
//!
//! Every command is driven by a [`RunConfig`]. Defaults are filled in before
//! running, and the completed config is embedded in the output (a `# rmom`
//! comment line for CSV, a `config` field for JSON) so a run can be replayed
//! with `rmom replay --from FILE`.

mod commands;
mod figures;
pub mod format;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statezoo::StateSpec;

pub use commands::{sector_report, McReport, SectorReport, CONJECTURE_THRESHOLD};
pub use figures::{table1_rows, table2_rows, ThresholdRow, FIGURE_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Analyze,
    Region,
    Mc,
    Sector,
    Conjecture,
    Figure,
}

/// Complete description of a run. Output paths are not part of it, so the
/// same config always produces the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub ppt: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_terms: Option<usize>,
    #[serde(default)]
    pub scan_gw: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            state: None,
            d: None,
            r: None,
            samples: None,
            seed: None,
            grid: None,
            restarts: None,
            ppt: false,
            max_terms: None,
            scan_gw: false,
            name: None,
            format: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Result of a command: the bytes to emit and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

/// Runs a config after filling in defaults.
pub fn execute(cfg: &RunConfig) -> Result<Output> {
    let cfg = commands::normalize(cfg.clone())?;
    commands::run(&cfg)
}

/// Config embedded in an output produced by [`execute`].
pub fn embedded_config(text: &str) -> Result<RunConfig> {
    if let Some(rest) = text.strip_prefix("# rmom ") {
        let line = rest.lines().next().unwrap_or_default();
        return Ok(serde_json::from_str(line)?);
    }
    let v: serde_json::Value = serde_json::from_str(text)?;
    let cfg = v
        .get("config")
        .ok_or_else(|| Error::usage("file has no embedded config"))?;
    Ok(serde_json::from_value(cfg.clone())?)
}

#[derive(Debug, Parser)]
#[command(name = "rmom", version, about = "Entanglement detection from randomized-measurement moments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run every detector on a state and report verdicts.
    Analyze(CommonArgs),
    /// Boundary curves of the (S2, S4) moment plane.
    Region(CommonArgs),
    /// Monte Carlo estimates of randomized-measurement moments.
    Mc(CommonArgs),
    /// Three-qubit sector lengths and criteria.
    Sector(CommonArgs),
    /// Search for violations of the biseparability bound by mixtures across bipartitions.
    Conjecture(CommonArgs),
    /// Data behind a figure or table.
    Figure(CommonArgs),
    /// Re-run the config embedded in an earlier output.
    Replay {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    /// Named state from the zoo.
    #[arg(long, conflicts_with = "file")]
    pub state: Option<String>,
    /// JSON state file: {"name":..,"params":{..}} or {"dims":[..],"re":[..],"im":[..]}.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<u32>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// A:B:STEPS, STEPS evenly spaced points from A to B inclusive.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Include the numerically optimized PPT boundary.
    #[arg(long)]
    pub ppt: bool,
    #[arg(long)]
    pub max_terms: Option<usize>,
    /// Scan the noisy GHZ-W (g, w) plane.
    #[arg(long)]
    pub scan_gw: bool,
    /// Figure or table name.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

fn state_from_args(a: &CommonArgs) -> Result<Option<StateSpec>> {
    if let Some(path) = &a.file {
        let text = std::fs::read_to_string(path)?;
        return StateSpec::from_json(&text).map(Some);
    }
    let Some(name) = &a.state else {
        return Ok(None);
    };
    let mut params = BTreeMap::new();
    for (k, v) in [("d", a.d.map(|x| x as f64)), ("g", a.g), ("w", a.w), ("p", a.p)] {
        if let Some(v) = v {
            params.insert(k.to_string(), v);
        }
    }
    Ok(Some(StateSpec::Named {
        name: name.clone(),
        params,
    }))
}

/// Builds the run config for a parsed command line.
pub fn config_from_args(kind: CommandKind, a: &CommonArgs) -> Result<RunConfig> {
    let state = state_from_args(a)?;
    if state.is_none() && (a.g.is_some() || a.w.is_some() || a.p.is_some()) {
        return Err(Error::usage("--g, --w and --p need --state"));
    }
    Ok(RunConfig {
        command: kind,
        state,
        d: a.d,
        r: a.r.clone(),
        samples: a.samples,
        seed: a.seed,
        grid: a.grid.clone(),
        restarts: a.restarts,
        ppt: a.ppt,
        max_terms: a.max_terms,
        scan_gw: a.scan_gw,
        name: a.name.clone(),
        format: a.format,
    })
}

fn emit(out: &Output, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, &out.text)?,
        None => print!("{}", out.text),
    }
    Ok(())
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = (|| -> Result<i32> {
        let (cfg, out_path) = match &cli.command {
            Cmd::Replay { from, out } => {
                let text = std::fs::read_to_string(from)?;
                (embedded_config(&text)?, out.clone())
            }
            Cmd::Analyze(a) => (config_from_args(CommandKind::Analyze, a)?, a.out.clone()),
            Cmd::Region(a) => (config_from_args(CommandKind::Region, a)?, a.out.clone()),
            Cmd::Mc(a) => (config_from_args(CommandKind::Mc, a)?, a.out.clone()),
            Cmd::Sector(a) => (config_from_args(CommandKind::Sector, a)?, a.out.clone()),
            Cmd::Conjecture(a) => (config_from_args(CommandKind::Conjecture, a)?, a.out.clone()),
            Cmd::Figure(a) => (config_from_args(CommandKind::Figure, a)?, a.out.clone()),
        };
        let out = execute(&cfg)?;
        emit(&out, out_path.as_ref())?;
        Ok(out.exit_code)
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses an `A:B:STEPS` grid into STEPS evenly spaced points, endpoints included.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::usage(format!("grid '{spec}' is not of the form A:B:STEPS")));
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| Error::usage(format!("bad grid start '{}'", parts[0])))?;
    let b: f64 = parts[1].trim().parse().map_err(|_| Error::usage(format!("bad grid end '{}'", parts[1])))?;
    let n: usize = parts[2].trim().parse().map_err(|_| Error::usage(format!("bad grid steps '{}'", parts[2])))?;
    if !a.is_finite() || !b.is_finite() || b < a {
        return Err(Error::usage(format!("grid '{spec}' needs finite A <= B")));
    }
    if n == 0 || n > 1_000_000 {
        return Err(Error::usage(format!("grid '{spec}' needs 1 <= STEPS <= 1000000")));
    }
    if n == 1 {
        if a != b {
            return Err(Error::usage(format!("grid '{spec}' with one step needs A = B")));
        }
        return Ok(vec![a]);
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { b } else { a + i as f64 * h }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.5:0.5:1").unwrap(), vec![0.5]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:1:3").is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = RunConfig::new(CommandKind::Mc);
        c.state = Some(StateSpec::named("bell"));
        c.samples = Some(1000);
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
