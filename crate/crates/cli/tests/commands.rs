use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};
use sepint_cli::{dispatch, stable_text, RunConfig};

fn sepint(out: &Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_sepint"))
        .args(args)
        .env("SEPINT_OUT", out)
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr);
    (o.status.code().unwrap_or(-1), text)
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sepint(dir.path(), &["suite", "nonexistent"]).0, 1);
    assert_eq!(sepint(dir.path(), &["orbit", "--bogus"]).0, 1);
    assert_eq!(sepint(dir.path(), &["--tol", "no_such_key=1", "suite", "smoke"]).0, 1);
    assert_eq!(sepint(dir.path(), &["radial-scan", "--N", "4", "--radial", "quartic"]).0, 1);
    assert_eq!(sepint(dir.path(), &[]).0, 1);
    assert_eq!(sepint(dir.path(), &["--help"]).0, 0);
    assert_eq!(sepint(dir.path(), &["--version"]).0, 0);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "suite", "params": {"name": "smoke"}, "colour": 3}"#).unwrap();
    let (code, text) = sepint(dir.path(), &["--config", cfg.to_str().unwrap(), "run"]);
    assert_eq!(code, 1, "{text}");

    let mut c = RunConfig::new("radial-scan");
    c.output_dir = dir.path().to_path_buf();
    c.params.insert("N".into(), json!(4));
    c.params.insert("radial".into(), json!("kepler"));
    c.params.insert("extra".into(), json!(1));
    assert!(dispatch(&c).is_err());
}

#[test]
fn failing_check_exits_two_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    // a standard (non-exotic) leading term does not survive a generic S
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"N": 4, "B1": [[4, 0, 1.0]]}"#).unwrap();
    let (code, text) = sepint(dir.path(), &["lcc-check", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 2, "{text}");
    let r = read(&dir.path().join("lcc-check.json"));
    assert_eq!(r["passed"], json!(false));
    assert!(r["results"]["max_relative"].as_f64().unwrap() > 1e-3);

    std::fs::write(&spec, r#"{"N": 4, "B1": [[2, 0, 1.0], [0, 1, 0.4]], "B2": [[1, 0, 0.3]]}"#).unwrap();
    let (code, text) = sepint(dir.path(), &["lcc-check", "--spec", spec.to_str().unwrap(), "--radial", "kepler"]);
    assert_eq!(code, 0, "{text}");
    let (code, text) = sepint(dir.path(), &["lcc-check", "--spec", spec.to_str().unwrap(), "--R", "zero", "--trials", "20"]);
    assert_eq!(code, 0, "{text}");
}

#[test]
fn construct_orbit_dependence_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let params = d.join("ttw-params.json");
    std::fs::write(&params, r#"{"family": "ttw", "b": 1, "alpha": 0.1, "beta": 0.1, "m": 2, "n": 1}"#).unwrap();
    let (code, text) = sepint(d, &["construct", "--params", params.to_str().unwrap(), "--name", "ttw"]);
    assert_eq!(code, 0, "{text}");
    assert!(d.join("ttw.json").exists() && d.join("ttw.csv").exists());
    let pot = d.join("ttw.json");
    let pot = pot.to_str().unwrap();

    let init = r#"{"r": 1.0, "theta": 0.5, "pr": 0.2, "lz": 0.4}"#;
    let (code, text) = sepint(d, &["orbit", "--potential", pot, "--init", init, "--periods", "10"]);
    assert_eq!(code, 0, "{text}");
    let orbit = read(&d.join("orbit-report.json"));
    assert_eq!(orbit["closed"], json!(true));
    assert_eq!((orbit["rational"]["p"].as_u64(), orbit["rational"]["q"].as_u64()), (Some(2), Some(1)));
    let csv = std::fs::read_to_string(d.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y,px,py"));

    let (code, text) = sepint(d, &["dependence", "--potential", pot, "--third", "product", "--expect", "syzygy"]);
    assert_eq!(code, 0, "{text}");
    let (code, text) =
        sepint(d, &["dependence", "--potential", pot, "--third", "generic", "--expect", "independent"]);
    assert_eq!(code, 0, "{text}");

    let (code, text) = sepint(d, &["report"]);
    assert_eq!(code, 0, "{text}");
    let summary = read(&d.join("report.json"));
    let commands: Vec<&str> = summary["results"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["command"].as_str().unwrap())
        .collect();
    assert!(commands.contains(&"construct") && commands.contains(&"orbit") && commands.contains(&"dependence"));
    let orbit_row = summary["results"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["command"] == json!("orbit"))
        .unwrap();
    assert_eq!(orbit_row["summary"]["closed"], json!(true));
}

#[test]
fn p6_writes_table_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "p6", "--gammas", "0.1,0.2,0.3,0.4", "--tau0", "0.5", "--p0", "0.3", "--dp0", "0.1", "--N", "4",
    ];
    let (code, text) = sepint(dir.path(), &args);
    assert_eq!(code, 0, "{text}");
    let r = read(&dir.path().join("p6.json"));
    assert!(r["results"]["max_residual"].as_f64().unwrap() < 1e-7);
    assert!(dir.path().join("p6.csv").exists());
    assert!(dir.path().join("exotic-quantum.json").exists());
}

#[test]
fn identical_inputs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let mut c = RunConfig::new("suite");
        c.output_dir = dir.path().join(sub);
        c.seed = 7;
        c.params.insert("name".into(), json!("smoke"));
        let out = dispatch(&c).unwrap();
        assert!(out.report.passed);
        stable_text(&std::fs::read_to_string(&out.path).unwrap()).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    assert!(a.contains("\"seed\": 7"));
}

#[test]
fn command_line_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let other = dir.path().join("elsewhere");
    std::fs::write(
        &cfg,
        json!({"command": "radial-scan", "params": {"N": 3, "radial": "onofri"}, "seed": 1}).to_string(),
    )
    .unwrap();
    let (code, text) = sepint(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "--out", other.to_str().unwrap(), "--seed", "9", "run"],
    );
    assert_eq!(code, 0, "{text}");
    let r = read(&other.join("radial-scan.json"));
    assert_eq!(r["inputs"]["seed"], json!(9));
    assert_eq!(r["results"]["dimension"], json!(0));
}

#[test]
fn suite_name_as_flag_or_positional() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = sepint(dir.path(), &["suite", "--name", "nonexistent"]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("unknown suite"));
    let (code, _) = sepint(dir.path(), &["suite", "smoke", "--name", "smoke"]);
    assert_eq!(code, 1);
}

#[test]
fn radial_scan_report_carries_spectrum_and_basis() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = sepint(dir.path(), &["radial-scan", "--N", "4", "--radial", "kepler"]);
    assert_eq!(code, 0, "{text}");
    let r = read(&dir.path().join("radial-scan.json"));
    let dim = r["results"]["dimension"].as_u64().unwrap();
    assert!(dim >= 1);
    assert_eq!(r["results"]["nullspace"].as_array().unwrap().len() as u64, dim);
    assert!(!r["results"]["spectrum"].as_array().unwrap().is_empty());
    assert!(r["tolerances"]["rank_relative"].is_number());
    let (code, _) = sepint(dir.path(), &["report"]);
    assert_eq!(code, 0);
    let s = read(&dir.path().join("report.json"));
    assert_eq!(s["results"]["reports"][0]["summary"]["dimension"].as_u64(), Some(dim));
}
