//! Scenario files: JSON text, unknown keys rejected, omitted parameters defaulted.

use std::path::PathBuf;

use serde::Deserialize;
use serde_json::Value;

use crate::attractor::AttractorParams;
use crate::manifold::{Manifold, NodeId, Rect};
use crate::planner::{CouplingParams, PlannerSetup};
use crate::wave::{Mode, WaveParams};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Schema(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("bad override `{arg}`: {reason}")]
    Override { arg: String, reason: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, reason: impl ToString) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Bump travels from `start` to `target`.
    #[default]
    Plan,
    /// Only the spiking layer runs, driven at `sources`.
    Wave,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid {
    nx: usize,
    ny: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    #[serde(default)]
    frame_stride: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    #[serde(default)]
    task: Task,
    grid: Grid,
    #[serde(default)]
    obstacles: Vec<Rect>,
    start: Option<[i64; 2]>,
    target: Option<[i64; 2]>,
    #[serde(default)]
    sources: Vec<[i64; 2]>,
    #[serde(default)]
    mode: Mode,
    seed: Option<u64>,
    #[serde(default)]
    wave: WaveParams,
    #[serde(default)]
    attractor: AttractorParams,
    #[serde(default)]
    coupling: CouplingParams,
    max_steps: Option<u32>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputOptions {
    pub dir: Option<PathBuf>,
    /// Write a frame every this many steps; 0 disables frames.
    pub frame_stride: u32,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub task: Task,
    pub manifold: Manifold,
    /// Present for [`Task::Plan`].
    pub start: Option<NodeId>,
    pub target: Option<NodeId>,
    /// Stimulated nodes for [`Task::Wave`].
    pub sources: Vec<NodeId>,
    pub setup: PlannerSetup,
    pub output: OutputOptions,
}

impl ScenarioConfig {
    pub fn max_steps(&self) -> u32 {
        self.setup.coupling.max_steps
    }
}

/// Parse scenario text into a JSON tree, reporting syntax errors by position.
pub fn parse_value(text: &str) -> Result<Value, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Apply `key.path=value`. The value is read as JSON, falling back to a plain string.
pub fn apply_override(root: &mut Value, arg: &str) -> Result<(), ConfigError> {
    let bad = |reason: &str| ConfigError::Override {
        arg: arg.to_string(),
        reason: reason.to_string(),
    };
    let (path, raw) = arg.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(bad("empty key"));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for key in &keys[..keys.len() - 1] {
        let obj = node.as_object_mut().ok_or_else(|| bad("path crosses a non-object value"))?;
        node = obj
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node.as_object_mut().ok_or_else(|| bad("path crosses a non-object value"))?;
    obj.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    resolve(parse_value(text)?)
}

pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let mut v = parse_value(text)?;
    for o in overrides {
        apply_override(&mut v, o)?;
    }
    resolve(v)
}

/// Turn a JSON tree into a checked scenario.
pub fn resolve(v: Value) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_value(v).map_err(|e| ConfigError::Schema(e.to_string()))?;

    raw.wave.validate().map_err(|e| section_err("wave", e))?;
    raw.attractor.validate().map_err(|e| section_err("attractor", e))?;
    let mut coupling = raw.coupling;
    if let Some(n) = raw.max_steps {
        coupling.max_steps = n;
    }
    coupling.validate().map_err(|e| section_err("coupling", e))?;

    let manifold =
        Manifold::new(raw.grid.nx, raw.grid.ny, &raw.obstacles).map_err(|e| ConfigError::invalid("grid", e))?;
    let place = |field: &str, p: [i64; 2]| {
        manifold
            .free_node(p[0], p[1])
            .map_err(|e| ConfigError::invalid(field, e))
    };

    let (start, target, sources) = match raw.task {
        Task::Plan => {
            let s = raw.start.ok_or_else(|| ConfigError::invalid("start", "required for a plan task"))?;
            let t = raw
                .target
                .ok_or_else(|| ConfigError::invalid("target", "required for a plan task"))?;
            (Some(place("start", s)?), Some(place("target", t)?), Vec::new())
        }
        Task::Wave => {
            if raw.sources.is_empty() {
                return Err(ConfigError::invalid("sources", "a wave task needs at least one source"));
            }
            let src = raw
                .sources
                .iter()
                .map(|&p| place("sources", p))
                .collect::<Result<Vec<_>, _>>()?;
            (None, None, src)
        }
    };

    if raw.mode == Mode::Heterogeneous && raw.seed.is_none() {
        return Err(ConfigError::invalid("seed", "heterogeneous mode needs an explicit seed"));
    }

    Ok(ScenarioConfig {
        name: raw.name.unwrap_or_else(|| "scenario".into()),
        task: raw.task,
        manifold,
        start,
        target,
        sources,
        setup: PlannerSetup {
            wave: raw.wave,
            attractor: raw.attractor,
            coupling,
            mode: raw.mode,
            seed: raw.seed.unwrap_or(0),
        },
        output: OutputOptions {
            dir: raw.output.dir,
            frame_stride: raw.output.frame_stride,
        },
    })
}

fn section_err(section: &str, e: crate::Error) -> ConfigError {
    match e {
        crate::Error::InvalidParam { name, reason } => ConfigError::invalid(format!("{section}.{name}"), reason),
        other => ConfigError::invalid(section, other),
    }
}
