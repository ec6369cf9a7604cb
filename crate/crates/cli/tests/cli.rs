use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fluctlab::config::{AlphaMode, Analysis};
use fluctlab::report::RunReport;

const GAUSSIAN_MODEL: &str = r#"
[model]
class = "gaussian"
dim = 1
"#;

fn fluctlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluctlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(config: &Path, out: &Path) -> Output {
    fluctlab(&["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_keys_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &format!("{GAUSSIAN_MODEL}colour = 1\n[numeric]\ntail_toll = 1e-6\n[[analysis]]\nkind = \"scaling-sweep\"\nordres = [2]\n"),
    );
    let o = fluctlab(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    for key in ["model.colour", "numeric.tail_toll", "analysis[0].ordres"] {
        assert!(e.contains(key), "{key} missing from {e}");
    }
}

#[test]
fn duplicate_keys_are_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "[model]\nclass = \"gaussian\"\ndim = 1\ndim = 2\n");
    let o = fluctlab(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("parse error"));
}

#[test]
fn missing_file_is_a_config_error() {
    let o = fluctlab(&["run", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn alpha_outside_square_integrable_window_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "[model]\nclass = \"power-law\"\ndim = 1\namp = 1.0\nbeta = 0.75\n\n[[analysis]]\nkind = \"scaling-sweep\"\nalpha = { mode = \"explicit\", value = 0.4 }\n",
    );
    let o = fluctlab(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("square-integrable window"), "{}", stderr(&o));
}

#[test]
fn invalid_model_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "[model]\nclass = \"power-law\"\ndim = 1\namp = 1.0\nbeta = 0.4\n");
    assert_eq!(fluctlab(&["validate", cfg.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn too_small_integration_box_exits_with_accuracy_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &format!(
            "{GAUSSIAN_MODEL}[numeric]\nquadrature = {{ p_max = 4.0, panels = 64, nodes = 8 }}\n\n[[analysis]]\nkind = \"scaling-sweep\"\n"
        ),
    );
    let o = run(&cfg, dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("analysis 0 (scaling-sweep)"));
}

#[test]
fn minimal_config_gets_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.toml", &format!("{GAUSSIAN_MODEL}[[analysis]]\nkind = \"scaling-sweep\"\n"));
    let o = run(&cfg, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report = RunReport::from_json(&std::fs::read_to_string(dir.path().join("min.json")).unwrap()).unwrap();
    let Analysis::ScalingSweep { alpha, .. } = &report.config.analysis[0] else { panic!("kind") };
    assert_eq!(*alpha, AlphaMode::Explicit { value: 0.5 });
    let rs = report.config.numeric.r_grid.points().unwrap();
    assert_eq!(rs.len(), 8);
    assert_eq!(rs[0], 8.0);
    assert_eq!(*rs.last().unwrap(), 512.0);
    assert!(dir.path().join("min.timings.json").exists());
}

#[test]
fn empty_analysis_list_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.toml", GAUSSIAN_MODEL);
    let o = run(&cfg, dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = RunReport::from_json(&std::fs::read_to_string(dir.path().join("empty.json")).unwrap()).unwrap();
    assert!(report.results.is_empty());
    let csv: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(csv.is_empty());
}

#[test]
fn outputs_round_trip_and_have_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/c01_normal_scaling.toml");
    let o = run(&cfg, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("c01_normal_scaling.json")).unwrap();
    let report = RunReport::from_json(&text).unwrap();
    assert_eq!(report.to_json().unwrap(), text);

    let csv = std::fs::read_to_string(dir.path().join("c01_normal_scaling.0-scaling-sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "l,R,re,im,abs");
    assert_eq!(lines.len(), 1 + 3 * 8);

    // slope of the l=3 plot series against an independent least-squares fit
    let plot = std::fs::read_to_string(dir.path().join("c01_normal_scaling.0-scaling-sweep.plot.tsv")).unwrap();
    let pts: Vec<(f64, f64)> = plot
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("l=3\t"))
        .map(|l| {
            let f: Vec<f64> = l.split('\t').skip(1).map(|x| x.parse().unwrap()).collect();
            (f[0], f[1])
        })
        .collect();
    assert_eq!(pts.len(), 8);
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / m, b + p.1 / m));
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() < 0.1, "slope {slope}");
}

#[test]
fn output_formats_can_be_restricted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "j.toml",
        &format!("{GAUSSIAN_MODEL}[output]\nformats = [\"json\"]\nstem = \"only\"\n[[analysis]]\nkind = \"scaling-sweep\"\n"),
    );
    assert!(run(&cfg, dir.path()).status.success());
    assert!(dir.path().join("only.json").exists());
    assert!(!dir.path().join("only.0-scaling-sweep.csv").exists());
}

#[test]
fn every_shipped_config_validates() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let o = fluctlab(&["validate", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), stderr(&o));
    }
}

#[test]
fn schema_describes_config_and_report() {
    let o = fluctlab(&["schema"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "fluctlab.run-report.v1");
    assert!(v["config"]["properties"]["analysis"].is_object());
    assert!(v["report"]["properties"]["results"].is_object());
    let o = fluctlab(&["schema", "--kind", "config"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["properties"]["model"].is_object());
}
