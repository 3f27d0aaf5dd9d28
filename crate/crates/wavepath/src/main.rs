use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use wavepath::config::{parse_config_with, ConfigError, ScenarioConfig, Task};
use wavepath::io::{self, VERIFY_HEADER};
use wavepath::{Error, Outcome};

const EXIT_IO: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "wavepath", version, about = "Wave-guided bump planner on a lattice")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario and write its trajectory.
    Run(Common),
    /// Run a scenario and print a comparison row against the BFS oracle.
    Verify(Common),
    /// Verify over a range of seeds in parallel.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Inclusive seed range, e.g. `0..9`.
        #[arg(long)]
        seeds: String,
    },
    /// Run a scenario and dump PGM frames.
    Render {
        #[command(flatten)]
        common: Common,
        /// Frame every this many steps.
        #[arg(long, default_value_t = 1)]
        stride: u32,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    config: PathBuf,
    /// Override a config key: `--set attractor.tau=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_steps: Option<u32>,
}

enum Failure {
    Config(ConfigError),
    Sim(Error),
    Other(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(c) => Failure::Config(c),
            other => Failure::Sim(other),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn load(c: &Common) -> Result<ScenarioConfig, Failure> {
    let text = std::fs::read_to_string(&c.config).with_context(|| format!("reading {}", c.config.display()))?;
    let mut sets = c.set.clone();
    if let Some(s) = c.seed {
        sets.push(format!("seed={s}"));
    }
    if let Some(d) = &c.out {
        sets.push(format!("output.dir={}", serde_json::Value::String(d.display().to_string())));
    }
    if let Some(n) = c.max_steps {
        sets.push(format!("max_steps={n}"));
    }
    Ok(parse_config_with(&text, &sets)?)
}

fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::Reached => 0,
        Outcome::StepBudgetExhausted => EXIT_BUDGET,
        Outcome::BumpLost => EXIT_NUMERIC,
    }
}

fn parse_seeds(s: &str) -> Result<std::ops::RangeInclusive<u64>, Failure> {
    let bad = || ConfigError::Override {
        arg: format!("--seeds {s}"),
        reason: "expected a..b".into(),
    };
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad().into());
    }
    Ok(a..=b)
}

fn execute(cli: Cli) -> Result<u8, Failure> {
    match cli.cmd {
        Cmd::Run(c) => {
            let cfg = load(&c)?;
            let out = io::run_scenario(&cfg)?;
            if cfg.task == Task::Wave {
                println!("wave run: {} steps", cfg.max_steps());
                return Ok(0);
            }
            let r = &out.result;
            println!(
                "outcome={} steps={} wavefronts={} path_length={:.4}",
                r.outcome,
                r.steps(),
                r.wavefronts_used,
                wavepath::planner::path_length(&cfg.manifold, &r.path)
            );
            Ok(outcome_code(r.outcome))
        }
        Cmd::Verify(c) => {
            let cfg = load(&c)?;
            let row = io::verify(&cfg)?;
            println!("{VERIFY_HEADER}");
            println!("{}", row.to_csv());
            Ok(outcome_code(row.outcome))
        }
        Cmd::Sweep { common, seeds } => {
            let range = parse_seeds(&seeds)?;
            let cfg = load(&common)?;
            println!("{VERIFY_HEADER}");
            let mut code = 0;
            for (seed, row) in io::sweep(&cfg, range) {
                match row {
                    Ok(r) => {
                        println!("{}", r.to_csv());
                        code = code.max(outcome_code(r.outcome));
                    }
                    Err(e) => {
                        eprintln!("seed {seed}: {e}");
                        code = code.max(if e.is_numerical() { EXIT_NUMERIC } else { EXIT_IO });
                    }
                }
            }
            Ok(code)
        }
        Cmd::Render { mut common, stride } => {
            common.set.push(format!("output.frame_stride={stride}"));
            if common.out.is_none() {
                common.out = Some(PathBuf::from("frames"));
            }
            let cfg = load(&common)?;
            let out = io::render(&cfg)?;
            println!("wrote {} files", out.files.len());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Sim(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() {
                EXIT_NUMERIC
            } else if matches!(e, Error::InvalidParam { .. } | Error::BlockedNode { .. }) {
                EXIT_CONFIG
            } else {
                EXIT_IO
            })
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
    }
}
