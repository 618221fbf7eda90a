use oddic::config::{self, parse_config, ConfigError};
use oddic_core::experiments::{DisruptorAssignment, GraphSource, InitialDistribution, RunConfig};
use oddic_core::{DisruptorSpec, Policy, SimSettings};

const MINIMAL: &str = r#"{"graph": {"random": {"n": 10, "in_degree": 4}}, "init": {"mean": 0, "std_dev": 1}}"#;

fn error_of(text: &str) -> ConfigError {
    parse_config(text).expect_err("config should be rejected")
}

#[test]
fn minimal_config_gets_defaults() {
    let c = parse_config(MINIMAL).unwrap().config;
    assert_eq!(c.settings.eta, 0.5);
    assert_eq!(c.settings.t_max, 40);
    assert_eq!(c.settings.err, 1e-7);
    assert_eq!(c.policy, Policy::Oddic);
    assert_eq!(c.master_seed, 0);
    assert!(c.disruptors.is_empty());
}

#[test]
fn zero_eta_names_the_rule() {
    let text = MINIMAL.replace(r#""init""#, r#""settings": {"eta": 0}, "init""#);
    let e = error_of(&text);
    assert!(matches!(e, ConfigError::Rule { .. }));
    assert!(e.to_string().contains("settings.eta"), "{e}");
}

#[test]
fn as_many_disruptors_as_nodes_is_rejected() {
    let text = r#"{"graph": {"random": {"n": 2, "in_degree": 1}}, "init": {"mean": 0, "std_dev": 1},
                   "disruptors": [{"kind": "T3"}, {"kind": "T3"}]}"#;
    let e = error_of(text);
    assert!(e.to_string().contains("|disruptors| < n"), "{e}");
}

#[test]
fn missing_field_is_named() {
    let e = error_of(r#"{"graph": {"fixture": "exp1_7node"}}"#);
    assert!(e.to_string().contains("`init`"), "{e}");
}

#[test]
fn unknown_field_is_named() {
    let text = MINIMAL.replace(r#""init""#, r#""settings": {"etta": 0.3}, "init""#);
    let e = error_of(&text);
    assert!(e.to_string().contains("etta"), "{e}");
}

#[test]
fn ill_typed_field_is_named_by_path() {
    let text = MINIMAL.replace(r#""std_dev": 1"#, r#""std_dev": "wide""#);
    let e = error_of(&text);
    assert!(e.to_string().contains("init.std_dev"), "{e}");
}

#[test]
fn behavior_parameters_checked_per_kind() {
    let text = MINIMAL.replace(r#""init""#, r#""disruptors": [{"kind": "T2"}], "init""#);
    assert!(error_of(&text).to_string().contains("disruptors[0].m"));
    let text = MINIMAL.replace(r#""init""#, r#""disruptors": [{"kind": "T3", "m": 1}], "init""#);
    assert!(error_of(&text).to_string().contains("disruptors[0].m"));
    let text = MINIMAL.replace(r#""init""#, r#""disruptors": [{"kind": "T9"}], "init""#);
    assert!(error_of(&text).to_string().contains("disruptors[0].kind"));
}

#[test]
fn duplicate_disruptor_node_rejected() {
    let text = MINIMAL.replace(r#""init""#, r#""disruptors": [{"kind": "T3", "node": 1}, {"kind": "T3", "node": 1}], "init""#);
    assert!(matches!(error_of(&text), ConfigError::Rule { .. }));
}

#[test]
fn fixtures_resolve_and_are_hashed() {
    let text = r#"{"graph": {"fixture": "exp1_7node"}, "init": {"mean": 50.5, "std_dev": 24.75},
                   "disruptors": [{"fixture": "EXP1_7/D1", "node": 0}, {"fixture": "EXP2/D3"}]}"#;
    let loaded = parse_config(text).unwrap();
    assert!(matches!(loaded.config.graph, GraphSource::Fixed(ref g) if g.node_count() == 7));
    assert_eq!(loaded.config.disruptors[1].spec, DisruptorSpec::Linear { gradient: 0.5738 });
    let keys: Vec<_> = loaded.fixtures.keys().cloned().collect();
    assert_eq!(keys, ["disruptors/EXP1_7", "disruptors/EXP2", "graph/exp1_7node"]);
}

#[test]
fn unknown_fixture_reported() {
    let e = error_of(r#"{"graph": {"fixture": "nope"}, "init": {"mean": 0, "std_dev": 1}}"#);
    assert!(e.to_string().contains("nope"), "{e}");
}

#[test]
fn load_of_write_is_identity() {
    let from_fixture = parse_config(
        r#"{"graph": {"fixture": "exp1_15node"}, "policy": {"msr": {"known_disruptors": 2}},
            "settings": {"eta": 0.3, "t_max": 12, "err": 1e-9, "direction": "literal", "sample_scope": "inclusive"},
            "init": {"mean": 8, "std_dev": 7}, "master_seed": 18446744073709551615,
            "disruptors": [{"fixture": "EXP1_7/D1", "node": 3}, {"kind": "T2", "m": -0.1707}, {"kind": "T3", "node": 11}]}"#,
    )
    .unwrap()
    .config;
    let plain = RunConfig {
        graph: GraphSource::Random { n: 20, in_degree: 6 },
        policy: Policy::Mean,
        settings: SimSettings { eta: 0.1 + 0.2, ..SimSettings::default() },
        init: InitialDistribution { mean: 1.0 / 3.0, std_dev: 0.0 },
        disruptors: vec![DisruptorAssignment {
            spec: DisruptorSpec::Sine { amplitude: 0.4523, shift_x: 1.5011, shift_y: 0.4289, omega: 1.8711 },
            node: None,
        }],
        master_seed: 5,
    };
    for c in [from_fixture, plain] {
        let again = parse_config(&config::to_json(&c)).unwrap().config;
        assert_eq!(again, c);
    }
}

#[test]
fn load_config_reports_missing_file() {
    let e = oddic::load_config(std::path::Path::new("/nonexistent/config.json")).unwrap_err();
    assert!(matches!(e, ConfigError::Io { .. }));
}
