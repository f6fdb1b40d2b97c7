use std::collections::BTreeSet;
use std::fs;
use std::process::Command;

use gneseek::bench::matrix::{example1_matrix, full_matrix, negative_matrix};
use gneseek::bench::{matrix, run_experiment, ExperimentConfig, GameSelection, SCHEMA};
use gneseek::dynamics::Family;
use gneseek::Error;

fn quick_config() -> ExperimentConfig {
    let mut c = example1_matrix().into_iter().find(|c| c.name == "example1_pfc1").unwrap();
    c.integrator.horizon = 2.0;
    c
}

#[test]
fn identical_configs_write_identical_artifacts() {
    let cfg = quick_config();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&cfg, Some(a.path())).unwrap();
    run_experiment(&cfg, Some(b.path())).unwrap();
    let read = |root: &std::path::Path, f: &str| fs::read(root.join(&cfg.name).join(f)).unwrap();
    assert_eq!(read(a.path(), "trajectory.csv"), read(b.path(), "trajectory.csv"));
    assert_eq!(read(a.path(), "plot.py"), read(b.path(), "plot.py"));
    let strip = |bytes: Vec<u8>| {
        let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    assert_eq!(strip(read(a.path(), "summary.json")), strip(read(b.path(), "summary.json")));
}

#[test]
fn csv_values_round_trip() {
    let cfg = quick_config();
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&cfg, Some(dir.path())).unwrap();
    let text = fs::read_to_string(dir.path().join(&cfg.name).join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    assert!(header.contains(&"distance"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), out.trajectory.states.len());
    for (row, s) in rows.iter().zip(&out.trajectory.states) {
        assert_eq!(&row[1..1 + s.len()], s.as_slice());
    }
}

#[test]
fn gate_blocks_integration() {
    for cfg in negative_matrix() {
        let dir = tempfile::tempdir().unwrap();
        match run_experiment(&cfg, Some(dir.path())) {
            Err(Error::CompensatorCheck { .. }) => {}
            other => panic!("{} was not gated: {:?}", cfg.name, other.map(|o| o.summary.exit_code)),
        }
        assert!(!dir.path().join(&cfg.name).exists());
    }
}

#[test]
fn matrix_covers_the_demonstrated_pairs() {
    let pairs: BTreeSet<(String, &'static str)> = full_matrix()
        .iter()
        .map(|c| {
            let game = match c.game {
                GameSelection::ZeroSumExample => "example1",
                GameSelection::Cournot { .. } => "cournot",
                GameSelection::Sensor { .. } => "sensor",
                GameSelection::Inline { .. } => "inline",
            };
            (c.family.name().to_string(), game)
        })
        .collect();
    let want = [
        (Family::Gp, "example1"),
        (Family::Pfc, "example1"),
        (Family::Ofc, "example1"),
        (Family::Gp, "cournot"),
        (Family::Pfc, "cournot"),
        (Family::Ofc, "cournot"),
        (Family::PartialGp, "cournot"),
        (Family::PartialPfc, "cournot"),
        (Family::PartialOfc, "cournot"),
        (Family::Generalized, "sensor"),
        (Family::PartialGeneralizedNocon, "example1"),
    ];
    for (f, g) in want {
        assert!(pairs.contains(&(f.name().to_string(), g)), "missing {} on {g}", f.name());
    }
    assert!(matrix("nope").is_err());
}

#[test]
fn config_json_round_trips() {
    for cfg in full_matrix() {
        let text = cfg.to_json().unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
    let bad = quick_config().to_json().unwrap().replace(SCHEMA, "other/v0");
    assert!(ExperimentConfig::from_json(&bad).is_err());
}

#[test]
fn cli_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_gneseek");
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");

    let converging = example1_matrix().into_iter().find(|c| c.name == "example1_pfc1").unwrap();
    fs::write(&cfg_path, converging.to_json().unwrap()).unwrap();
    let out = Command::new(exe)
        .args(["--output-root"])
        .arg(dir.path())
        .arg("run")
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("example1_pfc1/summary.json").exists());

    let status = Command::new(exe)
        .env("GNESEEK_OUTPUT_ROOT", dir.path())
        .args(["--horizon", "1", "run"])
        .arg(&cfg_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let status = Command::new(exe)
        .args(["--output-root"])
        .arg(dir.path())
        .args(["bench", "negative"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));

    let status = Command::new(exe).args(["run", "/definitely/missing.json"]).status().unwrap();
    assert_eq!(status.code(), Some(1));

    let out = Command::new(exe).arg("oracle").arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["kkt_point"]["x_star"].is_array());

    let block_path = dir.path().join("block.json");
    let block = gneseek::compensators::ofc_nd(1).unwrap().to_data();
    fs::write(&block_path, serde_json::to_string(&block).unwrap()).unwrap();
    let out = Command::new(exe).arg("verify-compensator").arg(&block_path).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["output_strict_passivity"]["holds"], true);
    assert_eq!(v["zero_dc_gain"]["Ok"], true);
}
