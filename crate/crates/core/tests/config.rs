use std::path::Path;

use fluctlab::config::{load_config, parse_config, AlphaMode, Analysis, GridSpec};
use fluctlab::run::run;
use fluctlab::Error;

const GAUSSIAN: &str = "[model]\nclass = \"gaussian\"\ndim = 1\n";
const POWER_LAW: &str = "[model]\nclass = \"power-law\"\ndim = 1\namp = 1.0\nbeta = 0.75\n";

fn config_error(text: &str) -> String {
    match parse_config(text) {
        Err(Error::Config(m)) => m,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn unknown_keys_are_all_reported() {
    let m = config_error(&format!("{GAUSSIAN}widht = 2.0\n[output]\nformat = [\"json\"]\n"));
    assert!(m.contains("model.widht") && m.contains("output.format"), "{m}");
}

#[test]
fn duplicate_keys_fail_to_parse() {
    let m = config_error("[numeric]\ntail_tol = 1e-6\ntail_tol = 1e-7\n");
    assert!(m.starts_with("parse error"), "{m}");
}

#[test]
fn canonical_alpha_resolves_to_half_dimension() {
    let cfg = parse_config(
        "[model]\nclass = \"gaussian\"\ndim = 2\n[[analysis]]\nkind = \"scaling-sweep\"\norders = [2, 3]\n",
    )
    .unwrap();
    assert_eq!(cfg.window.dim, Some(2));
    let Analysis::ScalingSweep { alpha, .. } = &cfg.analysis[0] else { panic!("kind") };
    assert_eq!(*alpha, AlphaMode::Explicit { value: 1.0 });
}

#[test]
fn default_grid_spans_8_to_512() {
    let cfg = parse_config(GAUSSIAN).unwrap();
    let rs = cfg.numeric.r_grid.points().unwrap();
    assert_eq!(rs.len(), 8);
    assert_eq!((rs[0], rs[7]), (8.0, 512.0));
    for w in rs.windows(2) {
        assert!((w[1] / w[0] - 512f64.powf(1.0 / 7.0) / 8f64.powf(1.0 / 7.0)).abs() < 1e-12);
    }
}

#[test]
fn grid_needs_exactly_one_of_ratio_and_stop() {
    let both = GridSpec::Geometric { start: 8.0, count: 4, ratio: Some(2.0), stop: Some(64.0) };
    assert!(matches!(both.points(), Err(Error::Config(_))));
    let neither = GridSpec::Geometric { start: 8.0, count: 4, ratio: None, stop: None };
    assert!(matches!(neither.points(), Err(Error::Config(_))));
    let listed: GridSpec = toml::from_str::<toml::Table>("g = [1.0, 2.0]").unwrap()["g"].clone().try_into().unwrap();
    assert_eq!(listed.points().unwrap(), vec![1.0, 2.0]);
}

#[test]
fn alpha_outside_l2_window_is_incompatible() {
    let sweep = |a: f64| format!("{POWER_LAW}[[analysis]]\nkind = \"scaling-sweep\"\nalpha = {{ mode = \"explicit\", value = {a} }}\n");
    assert!(config_error(&sweep(0.25)).contains("square-integrable window"));
    assert!(parse_config(&sweep(0.6)).is_ok());
}

#[test]
fn analyses_check_model_class() {
    let qmode = format!("{POWER_LAW}[[analysis]]\nkind = \"qmode\"\nq_values = [0.0]\n");
    assert!(config_error(&qmode).contains("qmode"));
    let ssb = format!("{GAUSSIAN}[[analysis]]\nkind = \"ssb-bound\"\n");
    assert!(config_error(&ssb).contains("model class is gaussian"));
    let weighted = format!("{GAUSSIAN}[[analysis]]\nkind = \"scaling-sweep\"\nalpha = {{ mode = \"weighted\" }}\n");
    assert!(config_error(&weighted).contains("weighted"));
    let no_window = "[[analysis]]\nkind = \"limit-state\"\n[[analysis.commutator_pairs]]\nlabel = \"p\"\n\
        f = [{ re = 1.0, shape = { kind = \"gaussian\", width = 1.0 } }]\n\
        g = [{ re = 1.0, shape = { kind = \"gaussian\", width = 1.0 } }]\n";
    assert!(config_error(no_window).contains("window dimension"));
}

#[test]
fn oracle_comparison_is_limited_to_the_line() {
    let text = "[model]\nclass = \"gaussian\"\ndim = 2\n[[analysis]]\nkind = \"scaling-sweep\"\noracle_r = [4.0]\n";
    assert!(matches!(parse_config(text), Err(Error::Unsupported(_))));
}

#[test]
fn invalid_models_are_validation_errors() {
    let err = parse_config("[model]\nclass = \"power-law\"\ndim = 1\namp = 1.0\nbeta = 0.5\n").unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn resolved_configs_round_trip_through_toml() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let cfg = load_config(&entry.unwrap().path()).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
        seen += 1;
    }
    assert!(seen > 0);
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_config(&dir.path().join("absent.toml")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn empty_analysis_list_runs_to_an_empty_report() {
    let (report, timings) = run(&parse_config(GAUSSIAN).unwrap()).unwrap();
    assert!(report.results.is_empty());
    assert!(timings.analyses.is_empty());
}
