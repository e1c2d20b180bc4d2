use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BURGERS: &str = r#"{"system": {"kind": "burgers2d"}, "baseline": true}
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclic-sparse")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn experiment_is_deterministic_and_echoes_config() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // odd formatting on purpose: the echo must keep it
    fs::write(d.join("b.json"), BURGERS.replace(", ", ",\n\t  ")).unwrap();
    ok(d, &["experiment", "--config", "b.json", "--out", "a"]);
    ok(d, &["experiment", "--config", "b.json", "--out", "b"]);
    assert_eq!(fs::read(d.join("b.json")).unwrap(), fs::read(d.join("a/config.json")).unwrap());
    assert_eq!(fs::read(d.join("a/result.json")).unwrap(), fs::read(d.join("b/result.json")).unwrap());

    let r = json(d.join("a/result.json"));
    let u = &r["components"][0];
    assert_eq!(u["support"].as_array().unwrap().len(), 9);
    assert_eq!(u["metrics"]["support_exact"], true);
    assert!(u["metrics"]["e_c"].as_f64().unwrap() < 0.03);
    assert!(u["e_c_ls"].as_f64().is_some());
}

#[test]
fn no_debias_reports_the_basis_pursuit_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("b.json"), BURGERS).unwrap();
    ok(d, &["experiment", "--config", "b.json", "--out", "o", "--no-debias"]);
    let r = json(d.join("o/result.json"));
    let u = &r["components"][0];
    assert_eq!(u["metrics"]["e_c"], u["e_c_lbp"]);
    // a later flag wins
    ok(d, &["experiment", "--config", "b.json", "--out", "p", "--no-debias", "--debias"]);
    let r = json(d.join("p/result.json"));
    assert_ne!(r["components"][0]["metrics"]["e_c"], r["components"][0]["e_c_lbp"]);
}

#[test]
fn seed_flag_replaces_config_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("l.json"),
        r#"{"system": {"kind": "lorenz96", "n": 32}, "block": 16, "radius": 2, "degree": 2, "sigma": [0.05],
            "solver": {"max_iters": 2000}}"#,
    )
    .unwrap();
    ok(d, &["experiment", "--config", "l.json", "--out", "a", "--seed", "5"]);
    ok(d, &["experiment", "--config", "l.json", "--out", "b", "--seed", "6"]);
    let (a, b) = (json(d.join("a/result.json")), json(d.join("b/result.json")));
    assert_eq!(a["config"]["seed"], 5);
    assert_eq!(b["config"]["seed"], 6);
    // the default noise draws from the experiment seed
    assert_ne!(a["components"][0]["coefficients"], b["components"][0]["coefficients"]);
}

#[test]
fn invalid_config_fails_with_stage_tag() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("bad.json"), r#"{"system": {"kind": "burgers2d"}, "degree": 4}"#).unwrap();
    let out = run(d, &["experiment", "--config", "bad.json"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("config"), "{err}");

    fs::write(d.join("typo.json"), r#"{"system": {"kind": "burgers2d"}, "blok": 7}"#).unwrap();
    assert!(!run(d, &["experiment", "--config", "typo.json"]).status.success());
    assert!(!run(d, &["experiment", "--config", "absent.json"]).status.success());
}

#[test]
fn simulate_build_dict_and_solve_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("b.json"), BURGERS).unwrap();
    ok(d, &["simulate", "--config", "b.json", "--out", "sim"]);
    let m = json(d.join("sim/simulation.json"));
    assert_eq!(m["snapshots"].as_array().unwrap().len(), 4);
    assert!(d.join("sim/burst3_u_t1.csv").exists());
    assert!(d.join("sim/burst0_u_velocity0.csv").exists());

    ok(d, &["build-dict", "--config", "b.json", "--out", "dict"]);
    let m = json(d.join("dict/dictionary.json"));
    assert_eq!((m["rows"].as_u64(), m["cols"].as_u64()), (Some(196), Some(351)));

    fs::write(
        d.join("s.json"),
        r#"{"dictionary": "dict/dictionary_legendre.csv", "velocity": "dict/velocity.csv",
            "component": "u", "sigma": 26.3609}"#,
    )
    .unwrap();
    ok(d, &["solve", "--config", "s.json", "--out", "sol"]);
    let s = json(d.join("sol/solution.json"));
    assert_eq!(s["converged"], true);
    assert!(s["residual"].as_f64().unwrap() <= 26.3609 * (1.0 + 1e-3));
    assert_eq!(s["debiased"], false);

    fs::write(d.join("nov.json"), r#"{"dictionary": "dict/dictionary_legendre.csv", "sigma": 1.0}"#).unwrap();
    let out = run(d, &["solve", "--config", "nov.json", "--out", "x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("velocity"));
}

#[test]
fn table_records_failed_rows_and_continues() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("t.json"),
        r#"{"base": {"system": {"kind": "burgers2d"}, "bursts": 1},
            "overrides": [{"label": "b7", "block": 7}, {"label": "broken", "degree": 9}, {"label": "b9", "block": 9}]}"#,
    )
    .unwrap();
    ok(d, &["table", "--config", "t.json", "--out", "one", "--jobs", "1"]);
    ok(d, &["table", "--config", "t.json", "--out", "many", "--jobs", "3"]);
    let csv = fs::read_to_string(d.join("one/table.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(d.join("many/table.csv")).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("label,system,component,seed"));
    assert!(lines[1].starts_with("b7,"));
    assert!(lines[2].starts_with("broken,") && lines[2].contains("degree"));
    assert!(lines[3].starts_with("b9,"));
    assert!(d.join("one/results/000_b7.json").exists());
    assert!(!d.join("one/results/001_broken.json").exists());

    fs::write(d.join("e.json"), r#"{"base": {"system": {"kind": "burgers2d"}}, "overrides": []}"#).unwrap();
    assert!(!run(d, &["table", "--config", "e.json", "--out", "e"]).status.success());
}

#[test]
fn fields_at_time_zero_have_zero_difference() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("b.json"), BURGERS).unwrap();
    ok(d, &["experiment", "--config", "b.json", "--out", "o", "--fields", "0"]);
    let r = json(d.join("o/fields.json"));
    assert_eq!(r["max_abs_difference"], serde_json::json!([0.0]));
    for name in ["exact_u_0.csv", "learned_u_0.csv", "diff_u_0.csv"] {
        assert!(d.join("o/fields").join(name).exists(), "{name}");
    }
}

#[test]
fn coherence_from_flags_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["coherence", "--n", "40", "--p", "1", "--trials", "10", "--out", "a"]);
    let r = json(d.join("a/coherence.json"));
    assert_eq!(r[0]["violations"], 0);
    assert_eq!(r[0]["trials"], 10);

    fs::write(d.join("c.json"), r#"{"cases": [[40, 1], [30, 2]], "trials": 5, "seed": 3}"#).unwrap();
    ok(d, &["coherence", "--config", "c.json", "--out", "b"]);
    ok(d, &["coherence", "--config", "c.json", "--out", "c"]);
    assert_eq!(json(d.join("b/coherence.json")).as_array().unwrap().len(), 2);
    assert_eq!(fs::read(d.join("b/coherence.json")).unwrap(), fs::read(d.join("c/coherence.json")).unwrap());
    assert!(!run(d, &["coherence", "--out", "x"]).status.success());
}
