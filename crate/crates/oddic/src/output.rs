//! CSV and manifest output.
//!
//! Every experiment directory holds four files:
//!
//! | file               | columns                                             |
//! |--------------------|-----------------------------------------------------|
//! | `trajectories.csv` | run_id, t, node, value, is_disruptor                |
//! | `metrics.csv`      | run_id, t, cm, cm_allnodes_norm                     |
//! | `summary.csv`      | batch_param, policy, t, mean_cm, min_cm, max_cm     |
//! | `manifest.json`    | tool version, seeds, config echo, hashes, row counts |
//!
//! `run_id` is `<batch_param>-<policy>-<run>`. Floats are written in Rust's
//! shortest round-trip form, so they re-parse to the same bits. Runs that
//! start in exact consensus have no metric and leave both metric columns
//! empty.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use oddic_core::experiments::{BatchSummary, RunRecord};
use oddic_core::metrics::{convergence_metric, total_difference};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {path}: {err}")]
    Io { path: PathBuf, err: std::io::Error },
    #[error("cannot write {path}: {err}")]
    Csv { path: PathBuf, err: csv::Error },
}

/// One run and its place in the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub batch_param: usize,
    pub run: usize,
    pub record: RunRecord,
}

impl RunEntry {
    pub fn run_id(&self) -> String {
        format!("{}-{}-{}", self.batch_param, self.record.policy, self.run)
    }
}

/// Everything one command produces, before it touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub command: String,
    pub master_seed: u64,
    pub config: serde_json::Value,
    /// Fixture name -> SHA-256 of its source text.
    pub fixtures: BTreeMap<String, String>,
    pub runs: Vec<RunEntry>,
    pub summaries: Vec<BatchSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowCounts {
    pub trajectories: usize,
    pub metrics: usize,
    pub summary: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub master_seed: u64,
    pub seed_derivation: &'static str,
    pub config: serde_json::Value,
    pub fixtures: BTreeMap<String, String>,
    pub rows: RowCounts,
}

const SEED_DERIVATION: &str =
    "ChaCha8 key = master(u64 le) | batch(u32 le) | run(u32 le) | label tag(u32 le) | label index(u32 le) | \"oddic\\0v1\"; labels graph=1, init=2, identity=3, noise(k)=4";

/// Round-trip-exact float text.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_outputs(out: &ExperimentOutput, dir: &Path) -> Result<Manifest, OutputError> {
    fs::create_dir_all(dir).map_err(|err| OutputError::Io { path: dir.into(), err })?;
    let rows = RowCounts {
        trajectories: write_csv(&dir.join("trajectories.csv"), |w| write_trajectories(w, &out.runs))?,
        metrics: write_csv(&dir.join("metrics.csv"), |w| write_metrics(w, &out.runs))?,
        summary: write_csv(&dir.join("summary.csv"), |w| write_summary(w, &out.summaries))?,
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: out.command.clone(),
        master_seed: out.master_seed,
        seed_derivation: SEED_DERIVATION,
        config: out.config.clone(),
        fixtures: out.fixtures.clone(),
        rows,
    };
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|err| OutputError::Io { path, err })?;
    Ok(manifest)
}

type CsvWriter = csv::Writer<fs::File>;

fn write_csv(
    path: &Path,
    body: impl FnOnce(&mut CsvWriter) -> csv::Result<usize>,
) -> Result<usize, OutputError> {
    let wrap = |err| OutputError::Csv { path: path.into(), err };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    let rows = body(&mut w).map_err(wrap)?;
    w.flush().map_err(|err| OutputError::Io { path: path.into(), err })?;
    Ok(rows)
}

fn write_trajectories(w: &mut CsvWriter, runs: &[RunEntry]) -> csv::Result<usize> {
    w.write_record(["run_id", "t", "node", "value", "is_disruptor"])?;
    let mut rows = 0;
    for entry in runs {
        let id = entry.run_id();
        for (t, state) in entry.record.states.iter().enumerate() {
            for (i, &v) in state.values().iter().enumerate() {
                let flag = if state.is_disruptor(i) { "1" } else { "0" };
                w.write_record([id.as_str(), &t.to_string(), &i.to_string(), &fmt_f64(v), flag])?;
                rows += 1;
            }
        }
    }
    Ok(rows)
}

/// All-node total difference at `t` over all-node total difference at 0,
/// floored like the main metric.
fn allnodes_norm(record: &RunRecord, err: f64) -> Vec<Option<f64>> {
    let td: Vec<f64> = record.states.iter().map(|s| total_difference(s.values())).collect();
    td.iter().map(|&d| convergence_metric(d, td[0], err).ok()).collect()
}

fn write_metrics(w: &mut CsvWriter, runs: &[RunEntry]) -> csv::Result<usize> {
    w.write_record(["run_id", "t", "cm", "cm_allnodes_norm"])?;
    let mut rows = 0;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for entry in runs {
        let id = entry.run_id();
        let series = entry.record.convergence.series();
        let err = series.map(|s| s.err());
        let all = err.map(|e| allnodes_norm(&entry.record, e));
        for t in 0..entry.record.states.len() {
            let cm = series.map(|s| s.values()[t]);
            let norm = all.as_ref().and_then(|a| a[t]);
            w.write_record([id.as_str(), &t.to_string(), &opt(cm), &opt(norm)])?;
            rows += 1;
        }
    }
    Ok(rows)
}

fn write_summary(w: &mut CsvWriter, summaries: &[BatchSummary]) -> csv::Result<usize> {
    w.write_record(["batch_param", "policy", "t", "mean_cm", "min_cm", "max_cm"])?;
    let mut rows = 0;
    for s in summaries {
        let param = s.batch_param.to_string();
        let policy = s.policy.to_string();
        for t in 0..s.mean.len() {
            w.write_record([
                param.as_str(),
                &policy,
                &t.to_string(),
                &fmt_f64(s.mean[t]),
                &fmt_f64(s.min[t]),
                &fmt_f64(s.max[t]),
            ])?;
            rows += 1;
        }
    }
    Ok(rows)
}
