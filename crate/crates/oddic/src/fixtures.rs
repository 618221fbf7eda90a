//! Bundled graph and disruptor fixtures.
//!
//! Graphs are `{"n": .., "in_neighbors": [[..], ..]}`. Disruptor tables are
//! `{"table": "EXP2", "disruptors": [{"id": "D1", "kind": "T1", ..}, ..]}`
//! and single behaviors are addressed as `TABLE/ID`, e.g. `EXP2/D3`.

use std::fs;
use std::path::{Path, PathBuf};

use oddic_core::graph::GraphError;
use oddic_core::{Digraph, DisruptorSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

struct Embedded {
    name: &'static str,
    text: &'static str,
}

const GRAPHS: &[Embedded] = &[
    Embedded { name: "exp1_7node", text: include_str!("../fixtures/graphs/exp1_7node.json") },
    Embedded { name: "exp1_15node", text: include_str!("../fixtures/graphs/exp1_15node.json") },
];

const TABLES: &[Embedded] = &[
    Embedded { name: "EXP1_7", text: include_str!("../fixtures/disruptors/exp1_7.json") },
    Embedded { name: "EXP1_15", text: include_str!("../fixtures/disruptors/exp1_15.json") },
    Embedded { name: "EXP2", text: include_str!("../fixtures/disruptors/exp2.json") },
    Embedded { name: "EXP3", text: include_str!("../fixtures/disruptors/exp3.json") },
];

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown graph fixture `{name}` (bundled: {known})")]
    UnknownGraph { name: String, known: String },
    #[error("unknown disruptor table `{name}` (bundled: {known})")]
    UnknownTable { name: String, known: String },
    #[error("disruptor table `{table}` has no entry `{id}`")]
    UnknownDisruptor { table: String, id: String },
    #[error("disruptor reference `{0}` must look like TABLE/ID, e.g. EXP2/D3")]
    BadReference(String),
    #[error("{origin}: field `{field}`: {message}")]
    Malformed { origin: String, field: String, message: String },
    #[error("{origin}: {err}")]
    InvalidGraph { origin: String, err: GraphError },
    #[error("cannot read {path}: {err}")]
    Io { path: PathBuf, err: std::io::Error },
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Parses JSON, reporting the path of the offending field on failure.
pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, (String, String)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        (field, e.into_inner().to_string())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub in_neighbors: Vec<Vec<usize>>,
}

impl GraphFile {
    pub fn from_graph(g: &Digraph) -> Self {
        Self { n: g.node_count(), in_neighbors: g.all_in_neighbors().to_vec() }
    }

    pub fn into_graph(self, origin: &str) -> Result<Digraph, FixtureError> {
        if self.in_neighbors.len() != self.n {
            return Err(FixtureError::Malformed {
                origin: origin.to_string(),
                field: "in_neighbors".into(),
                message: format!("{} rows listed but n = {}", self.in_neighbors.len(), self.n),
            });
        }
        Digraph::from_in_neighbors(self.in_neighbors)
            .map_err(|err| FixtureError::InvalidGraph { origin: origin.to_string(), err })
    }
}

/// A graph together with where it came from and the hash of its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub name: String,
    pub sha256: String,
    pub graph: Digraph,
}

pub fn parse_graph(text: &str, origin: &str) -> Result<LoadedGraph, FixtureError> {
    let file: GraphFile = parse_json(text).map_err(|(field, message)| FixtureError::Malformed {
        origin: origin.to_string(),
        field,
        message,
    })?;
    Ok(LoadedGraph { name: origin.to_string(), sha256: sha256_hex(text), graph: file.into_graph(origin)? })
}

pub fn graph_names() -> impl Iterator<Item = &'static str> {
    GRAPHS.iter().map(|e| e.name)
}

pub fn bundled_graph(name: &str) -> Result<LoadedGraph, FixtureError> {
    let e = GRAPHS.iter().find(|e| e.name == name).ok_or_else(|| FixtureError::UnknownGraph {
        name: name.to_string(),
        known: graph_names().collect::<Vec<_>>().join(", "),
    })?;
    parse_graph(e.text, e.name)
}

/// A bundled graph name, or else a path to a graph JSON file.
pub fn graph_by_name_or_path(arg: &str) -> Result<LoadedGraph, FixtureError> {
    if GRAPHS.iter().any(|e| e.name == arg) {
        return bundled_graph(arg);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(FixtureError::UnknownGraph {
            name: arg.to_string(),
            known: graph_names().collect::<Vec<_>>().join(", "),
        });
    }
    let text = fs::read_to_string(path).map_err(|err| FixtureError::Io { path: path.into(), err })?;
    parse_graph(&text, arg)
}

/// Behavior fields as written in tables and configs. Which parameters are
/// required depends on `kind`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorFields {
    pub kind: String,
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
}

impl BehaviorFields {
    pub fn from_spec(spec: &DisruptorSpec) -> Self {
        match *spec {
            DisruptorSpec::Sine { amplitude, shift_x, shift_y, omega } => Self {
                kind: "T1".into(),
                amplitude: Some(amplitude),
                s_x: Some(shift_x),
                s_y: Some(shift_y),
                omega: Some(omega),
                m: None,
            },
            DisruptorSpec::Linear { gradient } => Self { kind: "T2".into(), m: Some(gradient), ..Self::default() },
            DisruptorSpec::Noise => Self { kind: "T3".into(), ..Self::default() },
        }
    }

    /// Returns the offending field name and a message on failure.
    pub fn to_spec(&self) -> Result<DisruptorSpec, (&'static str, String)> {
        let present = [
            ("A", self.amplitude),
            ("s_x", self.s_x),
            ("s_y", self.s_y),
            ("omega", self.omega),
            ("m", self.m),
        ];
        let (needed, spec): (&[&str], _) = match self.kind.as_str() {
            "T1" => (&["A", "s_x", "s_y", "omega"], 1),
            "T2" => (&["m"], 2),
            "T3" => (&[], 3),
            other => return Err(("kind", format!("`{other}` is not one of T1, T2, T3"))),
        };
        for (name, value) in present {
            match (needed.contains(&name), value) {
                (true, None) => return Err((name, format!("required for kind {}", self.kind))),
                (false, Some(_)) => return Err((name, format!("not a parameter of kind {}", self.kind))),
                (_, Some(v)) if !v.is_finite() => return Err((name, format!("{v} is not finite"))),
                _ => {}
            }
        }
        let get = |v: Option<f64>| v.expect("checked above");
        Ok(match spec {
            1 => DisruptorSpec::Sine {
                amplitude: get(self.amplitude),
                shift_x: get(self.s_x),
                shift_y: get(self.s_y),
                omega: get(self.omega),
            },
            2 => DisruptorSpec::Linear { gradient: get(self.m) },
            _ => DisruptorSpec::Noise,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    id: String,
    kind: String,
    #[serde(rename = "A")]
    amplitude: Option<f64>,
    s_x: Option<f64>,
    s_y: Option<f64>,
    omega: Option<f64>,
    m: Option<f64>,
    /// Free-text provenance remark; ignored.
    #[allow(dead_code)]
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    table: String,
    disruptors: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisruptorTable {
    pub name: String,
    pub sha256: String,
    pub entries: Vec<(String, DisruptorSpec)>,
}

impl DisruptorTable {
    pub fn specs(&self) -> Vec<DisruptorSpec> {
        self.entries.iter().map(|(_, s)| *s).collect()
    }

    pub fn get(&self, id: &str) -> Result<DisruptorSpec, FixtureError> {
        self.entries.iter().find(|(i, _)| i == id).map(|(_, s)| *s).ok_or_else(|| {
            FixtureError::UnknownDisruptor { table: self.name.clone(), id: id.to_string() }
        })
    }
}

pub fn parse_table(text: &str, origin: &str) -> Result<DisruptorTable, FixtureError> {
    let malformed = |field: String, message: String| FixtureError::Malformed {
        origin: origin.to_string(),
        field,
        message,
    };
    let file: TableFile = parse_json(text).map_err(|(f, m)| malformed(f, m))?;
    let mut entries = Vec::with_capacity(file.disruptors.len());
    for (k, e) in file.disruptors.into_iter().enumerate() {
        if entries.iter().any(|(id, _)| *id == e.id) {
            return Err(malformed(format!("disruptors[{k}].id"), format!("duplicate id `{}`", e.id)));
        }
        let fields = BehaviorFields {
            kind: e.kind,
            amplitude: e.amplitude,
            s_x: e.s_x,
            s_y: e.s_y,
            omega: e.omega,
            m: e.m,
        };
        let spec = fields
            .to_spec()
            .map_err(|(field, message)| malformed(format!("disruptors[{k}].{field}"), message))?;
        entries.push((e.id, spec));
    }
    Ok(DisruptorTable { name: file.table, sha256: sha256_hex(text), entries })
}

pub fn table_names() -> impl Iterator<Item = &'static str> {
    TABLES.iter().map(|e| e.name)
}

pub fn bundled_table(name: &str) -> Result<DisruptorTable, FixtureError> {
    let e = TABLES.iter().find(|e| e.name == name).ok_or_else(|| FixtureError::UnknownTable {
        name: name.to_string(),
        known: table_names().collect::<Vec<_>>().join(", "),
    })?;
    let table = parse_table(e.text, e.name)?;
    debug_assert_eq!(table.name, e.name);
    Ok(table)
}

/// Resolves `TABLE/ID` to a behavior, returning the table for provenance.
pub fn bundled_disruptor(reference: &str) -> Result<(DisruptorSpec, DisruptorTable), FixtureError> {
    let (table, id) = reference
        .split_once('/')
        .ok_or_else(|| FixtureError::BadReference(reference.to_string()))?;
    let table = bundled_table(table)?;
    Ok((table.get(id)?, table))
}
