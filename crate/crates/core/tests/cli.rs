use std::path::Path;
use std::process::{Command, Output};

fn helios(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helios"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HELIOS_SEED")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_then_simulate_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = helios(
        &[
            "generate-data",
            "--days",
            "2",
            "--seed",
            "4",
            "--out",
            "day.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("day.csv")).unwrap();
    assert_eq!(text.lines().count(), 49);
    assert!(text.starts_with("hour,irradiance_kwh_m2,wind_ms,load_kw\n"));

    let out = helios(
        &[
            "simulate",
            "--data",
            "day.csv",
            "--strategy",
            "battery_first",
            "--out-dir",
            "res",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let trace = std::fs::read_to_string(dir.path().join("res/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 49);
    let summary = std::fs::read_to_string(dir.path().join("res/summary.json")).unwrap();
    assert!(summary.contains("\"strategy\": \"battery_first\""));
    assert!(!dir.path().join("res/convergence.csv").exists());
}

#[test]
fn fit_writes_config_lines() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("hour,irradiance_kwh_m2,wind_ms,load_kw,renewable_kw\n");
    for h in 0..30 {
        let g = (h % 7) as f64 / 7.0;
        let v = 2.0 + (h * 5 % 17) as f64;
        let p = 300.0 * g + 20.0 * v - 0.01 * v * v * v + 40.0;
        csv.push_str(&format!("{h},{g},{v},100,{p}\n"));
    }
    std::fs::write(dir.path().join("obs.csv"), csv).unwrap();
    let out = helios(&["fit", "obs.csv", "--out", "fitted.cfg"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let cfg = std::fs::read_to_string(dir.path().join("fitted.cfg")).unwrap();
    let a1: f64 = cfg
        .lines()
        .find_map(|l| l.strip_prefix("renewable.a1 = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((a1 - 300.0).abs() < 1e-6);

    // the fitted file is a valid config for simulate
    let out = helios(
        &[
            "simulate",
            "--config",
            "fitted.cfg",
            "--strategy",
            "renewable_first",
            "--out-dir",
            "r",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn fit_without_observed_column_names_it() {
    let dir = tempfile::tempdir().unwrap();
    helios(&["generate-data", "--out", "d.csv"], dir.path());
    let out = helios(&["fit", "d.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("renewable_kw"));
}

#[test]
fn malformed_csv_cites_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.csv"),
        "hour,irradiance_kwh_m2,wind_ms,load_kw\n0,0,8,100\n1,0,calm,100\n",
    )
    .unwrap();
    let out = helios(
        &["simulate", "--data", "bad.csv", "--out-dir", "r"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("wind_ms") && err.contains('2'), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_value = helios(
        &["simulate", "--set", "horizon=0", "--out-dir", "r"],
        dir.path(),
    );
    assert_eq!(bad_value.status.code(), Some(1));
    let bad_key = helios(
        &["compare", "--set", "colour=red", "--out-dir", "r"],
        dir.path(),
    );
    assert_eq!(bad_key.status.code(), Some(1));
    let bad_strategy = helios(
        &["compare", "--strategies", "eg_mpc,lucky", "--out-dir", "r"],
        dir.path(),
    );
    assert_eq!(bad_strategy.status.code(), Some(1));
    let budget = helios(
        &[
            "simulate",
            "--strategy",
            "standard_mpc",
            "--set",
            "max_dp_evaluations=10",
            "--out-dir",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(budget.status.code(), Some(2), "{}", stderr(&budget));
    let missing = helios(
        &["simulate", "--data", "missing.csv", "--out-dir", "r"],
        dir.path(),
    );
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cfg"), "seed = 5\n").unwrap();
    let run = |env: Option<&str>, flag: Option<&str>, out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_helios"));
        cmd.current_dir(dir.path())
            .args([
                "simulate",
                "--config",
                "c.cfg",
                "--strategy",
                "renewable_first",
                "--out-dir",
                out,
            ])
            .env_remove("HELIOS_SEED");
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        if let Some(e) = env {
            cmd.env("HELIOS_SEED", e);
        }
        assert!(cmd.status().unwrap().success());
        let json = std::fs::read_to_string(dir.path().join(out).join("summary.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v[0]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None, "a"), 5);
    assert_eq!(run(Some("77"), None, "b"), 77);
    assert_eq!(run(Some("77"), Some("3"), "c"), 3);
}

#[test]
fn compare_writes_every_strategy_and_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = helios(
        &[
            "compare",
            "--strategies",
            "eg_mpc,ac_mpc,fifty_fifty",
            "--set",
            "evo.generations=5",
            "--out-dir",
            "cmp",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    for f in [
        "trace_eg_mpc.csv",
        "trace_ac_mpc.csv",
        "trace_fifty_fifty.csv",
        "convergence_eg_mpc.csv",
        "convergence_ac_mpc.csv",
        "summary.txt",
        "summary.json",
    ] {
        assert!(dir.path().join("cmp").join(f).exists(), "{f}");
    }
    let conv = std::fs::read_to_string(dir.path().join("cmp/convergence_eg_mpc.csv")).unwrap();
    assert_eq!(conv.lines().next(), Some("hour,generation,best_cost"));
    assert_eq!(conv.lines().count(), 1 + 24 * 6);
}

#[test]
fn surface_grid_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = helios(&["surface", "--out", "s.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 11 * 26);
    let p: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("1,8,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((p - 238.992).abs() < 1e-9);
}
