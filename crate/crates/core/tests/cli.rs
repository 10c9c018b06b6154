use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_lzs");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("LZS_WORKERS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// CSV output with the wall-time line removed.
fn stable(o: &Output) -> String {
    stdout(o).lines().filter(|l| !l.starts_with("# wall_time_s")).collect::<Vec<_>>().join("\n")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

const RABI: &[&str] = &["rabi-freq", "--set", "gap=0.01", "--set", "coupling=0.1", "--set", "k=1", "--set", "n=0:100:10"];

#[test]
fn rabi_freq_csv_shape() {
    let o = run(RABI);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "n,omega_s,omega_q,a_eff");
    assert_eq!(data.len(), 1 + 11);
    assert!(data.iter().skip(1).all(|l| l.split(',').count() == 4));
    assert!(text.contains("# command: \"rabi-freq\""));
    assert!(text.contains("# config: "));
}

#[test]
fn output_is_deterministic_across_worker_counts() {
    let args = ["fit-shift", "--set", "coupling=0.1,1", "--set", "k=0,1,2", "--set", "n=200:1000:25"];
    let a = run(&[&args[..], &["--workers", "1"]].concat());
    let b = run(&[&args[..], &["--workers", "4"]].concat());
    let c = run(&args);
    assert!(a.status.success());
    assert_eq!(stable(&a), stable(&b));
    assert_eq!(stable(&a), stable(&c));
}

#[test]
fn json_round_trips_config() {
    let o = run(&[RABI, &["--format", "json"]].concat());
    let v = json(&o);
    assert_eq!(v["header"], serde_json::json!(["n", "omega_s", "omega_q", "a_eff"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
    let cfg = &v["metadata"]["config"];
    assert_eq!(cfg["coupling"], "0.1");
    assert_eq!(cfg["shift"], "0");
    assert_eq!(v["metadata"]["command"], "rabi-freq");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\ngap = 0.01\ncoupling = 0.1\nk = 1\nn = 0,5,10\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = run(&["rabi-freq", "--config", cfg.to_str().unwrap(), "--set", "n=1,2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("1,"));
}

#[test]
fn config_errors_exit_2() {
    let o = run(&["rabi-freq", "--set", "gap=0.01"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    // all missing keys are reported at once
    assert!(err.contains("coupling") && err.contains("`n`"), "{err}");

    let o = run(&["rabi-freq", "--set", "gap=-1", "--set", "coupling=0.1", "--set", "k=1", "--set", "n=1"]);
    assert_eq!(o.status.code(), Some(2));
    // bias must equal k
    let o = run(&[RABI, &["--set", "bias=2"]].concat());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["evolve", "--set", "picture=sideways"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["fit-shift", "--set", "coupling=0.1", "--set", "k=0", "--set", "n=1:5:0"]);
    assert_eq!(o.status.code(), Some(2));
    // an oscillator too large for the requested truncation
    let o = run(&[
        "evolve", "--set", "picture=quantum", "--set", "gap=0.4", "--set", "bias=2", "--set", "cavity=coherent",
        "--set", "mean_photons=10", "--set", "coupling=0.4", "--set", "n_max=15", "--set", "rabi_periods=1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_1() {
    let o = run(&["rabi-freq", "--config", "/nonexistent/lzs.cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn truncation_leak_exits_3() {
    let o = run(&[
        "evolve", "--set", "picture=quantum", "--set", "gap=0.4", "--set", "bias=2", "--set", "cavity=fock",
        "--set", "fock=60", "--set", "coupling=0.1", "--set", "n_max=62", "--set", "rabi_periods=1",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn fit_shift_reports_failed_cells() {
    let o = run(&["fit-shift", "--set", "coupling=0,0.1", "--set", "k=0,1", "--set", "n=0:40:10", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["metadata"]["failed_cells"], 2);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0][2].is_null() && rows[0][5].as_f64() == Some(0.0));
    assert!(rows[2][5].as_f64() == Some(1.0) && (rows[2][2].as_f64().unwrap() - 0.5).abs() < 0.1);
}

#[test]
fn bessel_approx_order_zero_forms_coincide() {
    let o = run(&["bessel-approx", "--set", "k=0", "--set", "x=0.5:20:0.5", "--format", "json"]);
    let v = json(&o);
    for row in v["rows"].as_array().unwrap() {
        assert_eq!(row[3], row[4]);
        assert_eq!(row[3], row[5]);
    }
    // outside the domain of the x > k forms
    let o = run(&["bessel-approx", "--set", "k=5", "--set", "x=3", "--format", "json"]);
    let v = json(&o);
    assert!(v["rows"][0][4].is_null() && !v["rows"][0][3].is_null());
}

#[test]
fn identity_sweep_rows_sorted() {
    let o = run(&["identity-sweep", "--set", "x=0.1,0.01", "--set", "n=10,0,5", "--set", "k=1,0", "--format", "json"]);
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    let keys: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r[0].as_f64().unwrap(), r[1].as_f64().unwrap(), r[2].as_f64().unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn evolve_offsets_column() {
    let base = [
        "evolve", "--set", "picture=quantum", "--set", "gap=0.4", "--set", "bias=2", "--set", "cavity=coherent",
        "--set", "mean_photons=10", "--set", "amplitude=10", "--set", "rabi_periods=1", "--set", "samples_per_period=8",
        "--format", "json",
    ];
    let plain = json(&run(&base));
    assert!(!plain["header"].as_array().unwrap().iter().any(|h| h == "p_down_shifted"));
    let o = run(&[&base[..], &["--offsets"]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let header = v["header"].as_array().unwrap();
    let (ip, is) = (header.iter().position(|h| h == "p_down").unwrap(), header.iter().position(|h| h == "p_down_shifted").unwrap());
    for row in v["rows"].as_array().unwrap() {
        let d = row[ip].as_f64().unwrap() - row[is].as_f64().unwrap();
        assert!((d - 0.75).abs() < 1e-12);
    }
    assert!((v["rows"][0][ip].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn worker_count_from_environment() {
    let args = ["identity-sweep", "--set", "x=0.05", "--set", "n=0:50:1", "--set", "k=0,1"];
    let a = Command::new(BIN).args(args).env("LZS_WORKERS", "3").output().unwrap();
    assert!(a.status.success());
    assert_eq!(stable(&a), stable(&run(&args)));
    let bad = Command::new(BIN).args(args).env("LZS_WORKERS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
