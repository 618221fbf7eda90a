use std::fs;
use std::path::Path;

use oddic::config::parse_config;
use oddic::runner::{self, Overrides, PolicyChoice};
use oddic::write_outputs;

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

const FILES: [&str; 4] = ["trajectories.csv", "metrics.csv", "summary.csv", "manifest.json"];

#[test]
fn empty_batch_writes_headers_and_manifest() {
    let out = runner::exp2(&Overrides { runs: Some(0), ..Overrides::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_outputs(&out, dir.path()).unwrap();
    assert_eq!(read(dir.path(), "trajectories.csv"), "run_id,t,node,value,is_disruptor\n");
    assert_eq!(read(dir.path(), "metrics.csv"), "run_id,t,cm,cm_allnodes_norm\n");
    assert_eq!(read(dir.path(), "summary.csv"), "batch_param,policy,t,mean_cm,min_cm,max_cm\n");
    assert_eq!((manifest.rows.trajectories, manifest.rows.metrics, manifest.rows.summary), (0, 0, 0));
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(json["command"], "exp2");
    assert_eq!(json["fixtures"]["disruptors/EXP2"].as_str().unwrap().len(), 64);
}

#[test]
fn rerun_is_byte_identical() {
    let o = Overrides { seed: Some(11), runs: Some(4), t_max: Some(10), ..Overrides::default() };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_outputs(&runner::exp3(&o).unwrap(), a.path()).unwrap();
    write_outputs(&runner::exp3(&o).unwrap(), b.path()).unwrap();
    for f in FILES {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn fifty_run_batch_row_counts() {
    let o = Overrides { policy: Some(PolicyChoice::Oddic), ..Overrides::default() };
    let out = runner::exp1(&o).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let m = write_outputs(&out, dir.path()).unwrap();
    // two networks, one policy kept, 50 runs each, 41 steps
    assert_eq!(m.rows.metrics, 2 * 50 * 41);
    assert_eq!(m.rows.trajectories, 50 * 41 * (7 + 15));
    assert_eq!(m.rows.summary, 2 * 41);
    assert_eq!(read(dir.path(), "metrics.csv").lines().count(), 1 + 2 * 50 * 41);
    let per_net: usize = read(dir.path(), "metrics.csv").lines().filter(|l| l.starts_with("7-oddic-")).count();
    assert_eq!(per_net, 50 * 41);
}

#[test]
fn csv_floats_reparse_to_the_simulated_bits() {
    let out = runner::exp1(&Overrides { runs: Some(2), ..Overrides::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&out, dir.path()).unwrap();

    let mut rdr = csv::Reader::from_path(dir.path().join("trajectories.csv")).unwrap();
    let mut expected = out.runs.iter().flat_map(|e| {
        e.record.states.iter().flat_map(|s| s.values().iter().copied().zip(s.disruptor_mask().iter().copied()))
    });
    for row in rdr.records() {
        let row = row.unwrap();
        let (v, d) = expected.next().unwrap();
        assert_eq!(row[3].parse::<f64>().unwrap().to_bits(), v.to_bits());
        assert_eq!(&row[4], if d { "1" } else { "0" });
    }
    assert!(expected.next().is_none());

    let mut rdr = csv::Reader::from_path(dir.path().join("metrics.csv")).unwrap();
    let mut cms = out.runs.iter().flat_map(|e| e.record.convergence.series().unwrap().values().iter().copied());
    for row in rdr.records() {
        let row = row.unwrap();
        assert_eq!(row[2].parse::<f64>().unwrap().to_bits(), cms.next().unwrap().to_bits());
        let norm: f64 = row[3].parse().unwrap();
        assert!(norm > 0.0 && norm.is_finite());
    }
}

#[test]
fn exact_consensus_leaves_metric_empty() {
    let loaded = parse_config(
        r#"{"graph": {"random": {"n": 5, "in_degree": 2}}, "init": {"mean": 3, "std_dev": 0}, "settings": {"t_max": 3}}"#,
    )
    .unwrap();
    let out = runner::run(loaded, &Overrides::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let m = write_outputs(&out, dir.path()).unwrap();
    assert_eq!(m.rows.metrics, 4);
    assert!(read(dir.path(), "metrics.csv").lines().skip(1).all(|l| l.ends_with(",,")));
    // no run contributes a series, so the summary is empty
    assert_eq!(m.rows.summary, 0);
}

#[test]
fn run_overrides_apply() {
    let loaded = parse_config(
        r#"{"graph": {"fixture": "exp1_7node"}, "init": {"mean": 50.5, "std_dev": 24.75},
            "disruptors": [{"fixture": "EXP1_7/D1", "node": 0}], "master_seed": 4}"#,
    )
    .unwrap();
    let o = Overrides {
        seed: Some(9),
        runs: Some(3),
        t_max: Some(5),
        policy: Some(PolicyChoice::Msr(Some(1))),
        ..Overrides::default()
    };
    let out = runner::run(loaded.clone(), &o).unwrap();
    assert_eq!(out.master_seed, 9);
    assert_eq!(out.runs.len(), 3);
    assert!(out.runs.iter().all(|r| r.record.t_max() == 5 && r.record.disruptor_nodes == [0]));
    assert_eq!(out.runs[2].run_id(), "7-msr1-2");
    assert_ne!(out.runs[0].record.states[0], out.runs[1].record.states[0]);
    let bare_msr = Overrides { policy: Some(PolicyChoice::Msr(None)), ..Overrides::default() };
    assert!(runner::run(loaded, &bare_msr).is_err());
}
