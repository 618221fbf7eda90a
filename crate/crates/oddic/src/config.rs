//! JSON run configuration.
//!
//! The file mirrors [`RunConfig`]; only `graph` and `init` are required:
//!
//! ```json
//! {
//!   "graph": {"fixture": "exp1_7node"},
//!   "policy": "oddic",
//!   "settings": {"eta": 0.5, "t_max": 40, "err": 1e-7},
//!   "init": {"mean": 50.5, "std_dev": 24.75},
//!   "disruptors": [{"fixture": "EXP1_7/D1", "node": 0}, {"kind": "T3"}],
//!   "master_seed": 7
//! }
//! ```
//!
//! `graph` is one of `{"fixture": name}`, `{"fixed": {"n", "in_neighbors"}}`
//! or `{"random": {"n", "in_degree"}}`. `policy` is `"oddic"`, `"mean"` or
//! `{"msr": {"known_disruptors": d}}`. A disruptor without `node` is placed
//! on a random node.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use oddic_core::consensus::{ConsensusError, SampleScope, UpdateDirection};
use oddic_core::experiments::{
    DisruptorAssignment, ExperimentError, GraphSource, InitialDistribution, RunConfig,
};
use oddic_core::graph::GraphError;
use oddic_core::metrics::DEFAULT_ERR;
use oddic_core::{Policy, SimSettings};
use serde::{Deserialize, Serialize};

use crate::fixtures::{self, BehaviorFields, FixtureError, GraphFile};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {err}")]
    Io { path: PathBuf, err: std::io::Error },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("rule violated ({rule}): {message}")]
    Rule { rule: &'static str, message: String },
    #[error(transparent)]
    Fixture(#[from] FixtureError),
}

fn field(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    Fixture(String),
    Fixed(GraphFile),
    Random { n: usize, in_degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    #[default]
    Oddic,
    Mean,
    Msr { known_disruptors: usize },
}

impl From<PolicySpec> for Policy {
    fn from(p: PolicySpec) -> Self {
        match p {
            PolicySpec::Oddic => Policy::Oddic,
            PolicySpec::Mean => Policy::Mean,
            PolicySpec::Msr { known_disruptors } => Policy::Msr { known_disruptors },
        }
    }
}

impl From<Policy> for PolicySpec {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Oddic => PolicySpec::Oddic,
            Policy::Mean => PolicySpec::Mean,
            Policy::Msr { known_disruptors } => PolicySpec::Msr { known_disruptors },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSpec {
    #[default]
    TowardAccepted,
    /// Debug only: the sign as printed, which pushes away from the mean.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeSpec {
    #[default]
    Received,
    Inclusive,
}

fn default_eta() -> f64 {
    oddic_core::consensus::DEFAULT_ETA
}
fn default_t_max() -> usize {
    oddic_core::experiments::DEFAULT_T_MAX
}
fn default_err() -> f64 {
    DEFAULT_ERR
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSpec {
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_err")]
    pub err: f64,
    #[serde(default)]
    pub direction: DirectionSpec,
    #[serde(default)]
    pub sample_scope: ScopeSpec,
}

impl Default for SettingsSpec {
    fn default() -> Self {
        SettingsSpec::from(SimSettings::default())
    }
}

impl From<SimSettings> for SettingsSpec {
    fn from(s: SimSettings) -> Self {
        Self {
            eta: s.eta,
            t_max: s.t_max,
            err: s.err,
            direction: match s.direction {
                UpdateDirection::TowardAccepted => DirectionSpec::TowardAccepted,
                UpdateDirection::Literal => DirectionSpec::Literal,
            },
            sample_scope: match s.scope {
                SampleScope::Received => ScopeSpec::Received,
                SampleScope::Inclusive => ScopeSpec::Inclusive,
            },
        }
    }
}

impl From<SettingsSpec> for SimSettings {
    fn from(s: SettingsSpec) -> Self {
        Self {
            eta: s.eta,
            t_max: s.t_max,
            err: s.err,
            direction: match s.direction {
                DirectionSpec::TowardAccepted => UpdateDirection::TowardAccepted,
                DirectionSpec::Literal => UpdateDirection::Literal,
            },
            scope: match s.sample_scope {
                ScopeSpec::Received => SampleScope::Received,
                ScopeSpec::Inclusive => SampleScope::Inclusive,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSpec {
    pub mean: f64,
    pub std_dev: f64,
}

/// A behavior given inline (`kind` plus parameters) or by `fixture`
/// reference, optionally pinned to a node.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisruptorEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub graph: GraphSpec,
    #[serde(default)]
    pub policy: PolicySpec,
    #[serde(default)]
    pub settings: SettingsSpec,
    pub init: InitSpec,
    #[serde(default)]
    pub disruptors: Vec<DisruptorEntry>,
    #[serde(default)]
    pub master_seed: u64,
}

/// A validated configuration and the hashes of the fixtures it pulled in.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub fixtures: BTreeMap<String, String>,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|err| ConfigError::Io { path: path.into(), err })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, ConfigError> {
    let file: ConfigFile = fixtures::parse_json(text).map_err(|(f, m)| field(f, m))?;
    resolve(file)
}

/// Turns a parsed file into a checked [`RunConfig`].
pub fn resolve(file: ConfigFile) -> Result<LoadedConfig, ConfigError> {
    let mut hashes = BTreeMap::new();
    let graph = match file.graph {
        GraphSpec::Fixture(name) => {
            let g = fixtures::bundled_graph(&name)?;
            hashes.insert(format!("graph/{name}"), g.sha256);
            GraphSource::Fixed(g.graph)
        }
        GraphSpec::Fixed(g) => GraphSource::Fixed(g.into_graph("graph.fixed")?),
        GraphSpec::Random { n, in_degree } => GraphSource::Random { n, in_degree },
    };

    let mut disruptors = Vec::with_capacity(file.disruptors.len());
    for (k, d) in file.disruptors.iter().enumerate() {
        let at = |f: &str| format!("disruptors[{k}].{f}");
        let spec = match (&d.fixture, &d.kind) {
            (Some(reference), None) => {
                let inline = [d.amplitude, d.s_x, d.s_y, d.omega, d.m];
                if inline.iter().any(Option::is_some) {
                    return Err(field(at("fixture"), "a fixture reference takes no inline parameters"));
                }
                let (spec, table) = fixtures::bundled_disruptor(reference)?;
                hashes.insert(format!("disruptors/{}", table.name), table.sha256);
                spec
            }
            (None, Some(kind)) => BehaviorFields {
                kind: kind.clone(),
                amplitude: d.amplitude,
                s_x: d.s_x,
                s_y: d.s_y,
                omega: d.omega,
                m: d.m,
            }
            .to_spec()
            .map_err(|(f, m)| field(at(f), m))?,
            (Some(_), Some(_)) => return Err(field(at("kind"), "give either `kind` or `fixture`, not both")),
            (None, None) => return Err(field(at("kind"), "missing; give `kind` or `fixture`")),
        };
        disruptors.push(DisruptorAssignment { spec, node: d.node });
    }

    let s = file.settings;
    if !(s.err > 0.0 && s.err.is_finite()) {
        return Err(field("settings.err", format!("{} must be finite and positive", s.err)));
    }
    if !file.init.mean.is_finite() {
        return Err(field("init.mean", format!("{} is not finite", file.init.mean)));
    }
    let config = RunConfig {
        graph,
        policy: file.policy.into(),
        settings: s.into(),
        init: InitialDistribution { mean: file.init.mean, std_dev: file.init.std_dev },
        disruptors,
        master_seed: file.master_seed,
    };
    config.validate().map_err(rule_violation)?;
    Ok(LoadedConfig { config, fixtures: hashes })
}

fn rule_violation(e: ExperimentError) -> ConfigError {
    let message = e.to_string();
    let rule = match e {
        ExperimentError::Consensus(ConsensusError::InvalidEta(_)) => "settings.eta in (0, 1]",
        ExperimentError::ZeroHorizon => "settings.t_max >= 1",
        ExperimentError::TooManyDisruptors { .. } => "|disruptors| < n",
        ExperimentError::BadDisruptorNode { .. } => "disruptors[].node distinct and < n",
        ExperimentError::InvalidStdDev(_) => "init.std_dev finite and >= 0",
        ExperimentError::EmptyGraph => "graph has n >= 1",
        ExperimentError::Graph(GraphError::InDegreeOutOfRange { .. }) => {
            "graph.random: 1 <= in_degree < n"
        }
        _ => "run configuration",
    };
    ConfigError::Rule { rule, message }
}

/// Inverse of [`resolve`]: fixtures are written out inline, so the result
/// loads back to the same [`RunConfig`].
pub fn to_file(config: &RunConfig) -> ConfigFile {
    ConfigFile {
        graph: match &config.graph {
            GraphSource::Fixed(g) => GraphSpec::Fixed(GraphFile::from_graph(g)),
            GraphSource::Random { n, in_degree } => GraphSpec::Random { n: *n, in_degree: *in_degree },
        },
        policy: config.policy.into(),
        settings: config.settings.into(),
        init: InitSpec { mean: config.init.mean, std_dev: config.init.std_dev },
        disruptors: config
            .disruptors
            .iter()
            .map(|d| {
                let b = BehaviorFields::from_spec(&d.spec);
                DisruptorEntry {
                    fixture: None,
                    kind: Some(b.kind),
                    amplitude: b.amplitude,
                    s_x: b.s_x,
                    s_y: b.s_y,
                    omega: b.omega,
                    m: b.m,
                    node: d.node,
                }
            })
            .collect(),
        master_seed: config.master_seed,
    }
}

pub fn to_json(config: &RunConfig) -> String {
    serde_json::to_string_pretty(&to_file(config)).expect("config serializes")
}
