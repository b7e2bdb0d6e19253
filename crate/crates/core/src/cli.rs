//! Command-line interface: `serve`, `eval`, `sweep` and `oracle`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use crate::bridge::metrics::{summarize, write_metrics, write_summary};
use crate::bridge::oracle::{oracle_exhaustive, OracleResult};
use crate::bridge::policy::PolicyKind;
use crate::bridge::server::{serve, Transport};
use crate::bridge::sweep::{evaluate, sweep, write_sweep, SweepSpec};
use crate::channel::{realize_channels, SlotSeed};
use crate::scenario::ScenarioConfig;

#[derive(Debug, Parser)]
#[command(
    name = "dualris",
    version,
    about = "Dual-RIS UAV network simulator and RL environment server"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario configuration (JSON). Defaults are used when omitted.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed of the first episode; episode e uses seed + e.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Serve the environment over newline-delimited JSON.
    Serve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "stdio", value_name = "stdio|tcp:PORT")]
        transport: Transport,
    },
    /// Run a baseline policy and write per-slot metrics.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        episodes: usize,
        #[arg(long, value_enum, default_value_t = PolicyKind::Matched)]
        policy: PolicyKind,
        /// Metrics CSV; the summary goes to stdout. Without it the metrics
        /// go to stdout instead.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Evaluate a baseline over a list of values of one configuration key.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "KEY=v1,v2,...")]
        sweep: SweepSpec,
        #[arg(long, default_value_t = 1)]
        episodes: usize,
        #[arg(long, value_enum, default_value_t = PolicyKind::Matched)]
        policy: PolicyKind,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Exhaustive grid search on the first slot's channels of a small scenario.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16)]
        levels: usize,
        #[arg(long, default_value_t = 4)]
        beam_grid: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<ScenarioConfig> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ScenarioConfig::from_json(&text).with_context(|| format!("loading {}", p.display()))
        }
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

#[derive(Serialize)]
struct OracleReport<'a> {
    seed: u64,
    #[serde(flatten)]
    result: &'a OracleResult,
}

/// Execute a parsed command. Text output goes to `stdout` unless an
/// `--out` file is given.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Serve { common, transport } => {
            let cfg = load_config(common.config.as_deref())?;
            serve(&cfg, transport)?;
        }
        Command::Eval {
            common,
            episodes,
            policy,
            out,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let traces = evaluate(&cfg, policy, common.seed, episodes)?;
            match out {
                Some(p) => {
                    let mut f = create(&p)?;
                    write_metrics(&mut f, cfg.num_nodes(), &traces)?;
                    f.flush()?;
                    write_summary(
                        &mut *stdout,
                        &policy.to_string(),
                        &summarize(&cfg, &traces)?,
                    )?;
                }
                None => write_metrics(&mut *stdout, cfg.num_nodes(), &traces)?,
            }
        }
        Command::Sweep {
            common,
            sweep: spec,
            episodes,
            policy,
            out,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let points = sweep(&cfg, &spec, policy, common.seed, episodes)?;
            match out {
                Some(p) => {
                    let mut f = create(&p)?;
                    write_sweep(&mut f, &spec.key, &points)?;
                    f.flush()?;
                }
                None => write_sweep(&mut *stdout, &spec.key, &points)?,
            }
        }
        Command::Oracle {
            common,
            levels,
            beam_grid,
            out,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let ch = realize_channels(
                &cfg,
                &cfg.uav_start,
                SlotSeed {
                    seed: common.seed,
                    slot: 0,
                },
            )?;
            let result = oracle_exhaustive(&ch, &cfg, levels, beam_grid)?;
            let text = serde_json::to_string_pretty(&OracleReport {
                seed: common.seed,
                result: &result,
            })?;
            match out {
                Some(p) => std::fs::write(&p, text + "\n")
                    .with_context(|| format!("writing {}", p.display()))?,
                None => writeln!(stdout, "{text}")?,
            }
        }
    }
    stdout.flush()?;
    Ok(())
}

/// Parse arguments and run, returning the process exit code. Usage errors
/// print clap's message and return 2; runtime failures return 1.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let rendered = e.render().to_string();
            if e.use_stderr() && !rendered.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return e.exit_code();
        }
    };
    let mut stdout = io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
