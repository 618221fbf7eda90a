//! Command drivers: assemble scenarios from fixtures, run them, and package
//! the results for [`crate::output::write_outputs`].

use std::collections::BTreeMap;
use std::str::FromStr;

use oddic_core::consensus::{SampleScope, UpdateDirection};
use oddic_core::experiments::{
    run_experiment2, run_experiment3, run_fixed_pair, run_indexed, BatchResult, BatchSummary,
    ConnectivitySweep, DisruptorSweep, FixedScenario, InitialDistribution, DEFAULT_RUNS,
};
use oddic_core::graph::robustness::check_rs_robustness;
use oddic_core::{Policy, SimSettings};
use serde_json::json;

use crate::config::{self, LoadedConfig, SettingsSpec};
use crate::fixtures::{self, LoadedGraph};
use crate::output::{ExperimentOutput, RunEntry};
use crate::Error;

/// `--policy` value: a concrete policy, or `msr` for MSR with any `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyChoice {
    Oddic,
    Mean,
    Msr(Option<usize>),
}

impl FromStr for PolicyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "oddic" => Ok(Self::Oddic),
            "mean" => Ok(Self::Mean),
            "msr" => Ok(Self::Msr(None)),
            _ => s
                .strip_prefix("msr:")
                .and_then(|d| d.parse().ok())
                .map(|d| Self::Msr(Some(d)))
                .ok_or_else(|| format!("`{s}`: expected oddic, mean, msr or msr:<d>")),
        }
    }
}

impl PolicyChoice {
    pub fn matches(&self, p: Policy) -> bool {
        match (self, p) {
            (Self::Oddic, Policy::Oddic) | (Self::Mean, Policy::Mean) => true,
            (Self::Msr(None), Policy::Msr { .. }) => true,
            (Self::Msr(Some(d)), Policy::Msr { known_disruptors }) => *d == known_disruptors,
            _ => false,
        }
    }

    fn policy(&self) -> Option<Policy> {
        match *self {
            Self::Oddic => Some(Policy::Oddic),
            Self::Mean => Some(Policy::Mean),
            Self::Msr(Some(d)) => Some(Policy::Msr { known_disruptors: d }),
            Self::Msr(None) => None,
        }
    }
}

/// Command-line overrides. Unset fields keep the config or experiment
/// defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub t_max: Option<usize>,
    pub policy: Option<PolicyChoice>,
    pub literal_eq11: bool,
    pub inclusive_sample: bool,
}

impl Overrides {
    fn settings(&self, mut base: SimSettings) -> SimSettings {
        if let Some(t) = self.t_max {
            base.t_max = t;
        }
        if self.literal_eq11 {
            base.direction = UpdateDirection::Literal;
        }
        if self.inclusive_sample {
            base.scope = SampleScope::Inclusive;
        }
        base
    }

    fn keep(&self, p: Policy) -> bool {
        self.policy.is_none_or(|c| c.matches(p))
    }
}

fn settings_json(s: SimSettings) -> serde_json::Value {
    serde_json::to_value(SettingsSpec::from(s)).expect("settings serialize")
}

fn init_json(init: InitialDistribution) -> serde_json::Value {
    json!({ "mean": init.mean, "std_dev": init.std_dev })
}

/// `run`: one configuration, `--runs` independent seeds (default 1).
pub fn run(loaded: LoadedConfig, o: &Overrides) -> Result<ExperimentOutput, Error> {
    let mut cfg = loaded.config;
    cfg.settings = o.settings(cfg.settings);
    if let Some(seed) = o.seed {
        cfg.master_seed = seed;
    }
    if let Some(choice) = o.policy {
        cfg.policy = choice
            .policy()
            .ok_or_else(|| Error::Usage("`run --policy msr` needs a disruptor count, e.g. msr:2".into()))?;
    }
    cfg.validate().map_err(Error::Experiment)?;
    let runs = o.runs.unwrap_or(1);
    let n = cfg.graph.node_count();
    let records = (0..runs)
        .map(|r| run_indexed(&cfg, r as u32))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = BatchSummary::from_records(n, cfg.policy, &records);
    Ok(ExperimentOutput {
        command: "run".into(),
        master_seed: cfg.master_seed,
        config: json!({ "runs": runs, "run_config": serde_json::to_value(config::to_file(&cfg)).expect("config serializes") }),
        fixtures: loaded.fixtures,
        runs: records
            .into_iter()
            .enumerate()
            .map(|(run, record)| RunEntry { batch_param: n, run, record })
            .collect(),
        summaries: if runs == 0 { vec![] } else { vec![summary] },
    })
}

struct Exp1Case {
    graph: &'static str,
    table: &'static str,
    nodes: [usize; 2],
    init: InitialDistribution,
}

const EXP1_CASES: [Exp1Case; 2] = [
    Exp1Case {
        graph: "exp1_7node",
        table: "EXP1_7",
        nodes: [0, 6],
        init: InitialDistribution { mean: 50.5, std_dev: 24.75 },
    },
    Exp1Case {
        graph: "exp1_15node",
        table: "EXP1_15",
        nodes: [3, 11],
        init: InitialDistribution { mean: 8.0, std_dev: 7.0 },
    },
];

/// `exp1`: the two fixed networks, ODDI-C against the plain mean, one run
/// per seed. `batch_param` is the node count.
pub fn exp1(o: &Overrides) -> Result<ExperimentOutput, Error> {
    let seed = o.seed.unwrap_or(0);
    let runs = o.runs.unwrap_or(DEFAULT_RUNS);
    let settings = o.settings(SimSettings::default());
    let mut hashes = BTreeMap::new();
    let mut entries = Vec::new();
    let mut summaries = Vec::new();
    let mut cases = Vec::new();
    for case in &EXP1_CASES {
        let LoadedGraph { sha256, graph, .. } = fixtures::bundled_graph(case.graph)?;
        let table = fixtures::bundled_table(case.table)?;
        hashes.insert(format!("graph/{}", case.graph), sha256);
        hashes.insert(format!("disruptors/{}", case.table), table.sha256.clone());
        let n = graph.node_count();
        let scenario = FixedScenario {
            graph,
            init: case.init,
            disruptors: case.nodes.iter().copied().zip(table.specs()).collect(),
        };
        let mut oddic = Vec::with_capacity(runs);
        let mut mean = Vec::with_capacity(runs);
        for r in 0..runs {
            let pair = run_fixed_pair(&scenario, &settings, seed, r as u32)?;
            oddic.push(pair.oddic);
            mean.push(pair.mean);
        }
        for records in [oddic, mean] {
            let Some(policy) = records.first().map(|r| r.policy) else { continue };
            if !o.keep(policy) {
                continue;
            }
            summaries.push(BatchSummary::from_records(n, policy, &records));
            entries.extend(records.into_iter().enumerate().map(|(run, record)| RunEntry {
                batch_param: n,
                run,
                record,
            }));
        }
        cases.push(json!({
            "graph": case.graph,
            "disruptor_table": case.table,
            "disruptor_nodes": case.nodes,
            "init": init_json(case.init),
        }));
    }
    Ok(ExperimentOutput {
        command: "exp1".into(),
        master_seed: seed,
        config: json!({ "runs": runs, "settings": settings_json(settings), "cases": cases }),
        fixtures: hashes,
        runs: entries,
        summaries,
    })
}

fn package(
    command: &str,
    seed: u64,
    config: serde_json::Value,
    hashes: BTreeMap<String, String>,
    batches: Vec<BatchResult>,
    o: &Overrides,
) -> ExperimentOutput {
    let mut runs = Vec::new();
    let mut summaries = Vec::new();
    for b in batches.into_iter().filter(|b| o.keep(b.policy)) {
        summaries.push(b.summary);
        runs.extend(b.records.into_iter().enumerate().map(|(run, record)| RunEntry {
            batch_param: b.batch_param,
            run,
            record,
        }));
    }
    ExperimentOutput { command: command.into(), master_seed: seed, config, fixtures: hashes, runs, summaries }
}

/// `exp2`: in-degree sweep with five disruptors, ODDI-C against MSR(5).
/// `batch_param` is the in-degree.
pub fn exp2(o: &Overrides) -> Result<ExperimentOutput, Error> {
    let table = fixtures::bundled_table("EXP2")?;
    let seed = o.seed.unwrap_or(0);
    let mut sweep = ConnectivitySweep::standard(table.specs(), seed);
    sweep.plan.runs = o.runs.unwrap_or(sweep.plan.runs);
    sweep.plan.settings = o.settings(sweep.plan.settings);
    let config = json!({
        "n": sweep.plan.n,
        "runs": sweep.plan.runs,
        "in_degrees": sweep.in_degrees,
        "msr_known_disruptors": sweep.msr_known,
        "init": init_json(sweep.plan.init),
        "settings": settings_json(sweep.plan.settings),
        "disruptor_table": table.name,
    });
    let hashes = BTreeMap::from([(format!("disruptors/{}", table.name), table.sha256)]);
    let batches = run_experiment2(&sweep)?;
    Ok(package("exp2", seed, config, hashes, batches, o))
}

/// `exp3`: disruptor-count sweep at in-degree 6, ODDI-C against MSR(|D|).
/// `batch_param` is |D|.
pub fn exp3(o: &Overrides) -> Result<ExperimentOutput, Error> {
    let table = fixtures::bundled_table("EXP3")?;
    let seed = o.seed.unwrap_or(0);
    let mut sweep = DisruptorSweep::standard(table.specs(), seed);
    sweep.plan.runs = o.runs.unwrap_or(sweep.plan.runs);
    sweep.plan.settings = o.settings(sweep.plan.settings);
    let config = json!({
        "n": sweep.plan.n,
        "runs": sweep.plan.runs,
        "in_degree": sweep.in_degree,
        "disruptor_counts": (0..=sweep.specs.len()).collect::<Vec<_>>(),
        "init": init_json(sweep.plan.init),
        "settings": settings_json(sweep.plan.settings),
        "disruptor_table": table.name,
    });
    let hashes = BTreeMap::from([(format!("disruptors/{}", table.name), table.sha256)]);
    let batches = run_experiment3(&sweep)?;
    Ok(package("exp3", seed, config, hashes, batches, o))
}

/// `robustness`: exhaustive (r,s)-robustness of a bundled or on-disk graph.
pub fn robustness(graph: &str, r: usize, s: usize) -> Result<(LoadedGraph, bool), Error> {
    let loaded = fixtures::graph_by_name_or_path(graph)?;
    let robust = check_rs_robustness(&loaded.graph, r, s).map_err(|e| Error::Experiment(e.into()))?;
    Ok((loaded, robust))
}
