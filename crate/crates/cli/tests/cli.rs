use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn slq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slq")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn dirichlet_table() {
    let out = slq(&["solve", "--config", &config("dirichlet.json"), "--n-max", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().next().unwrap(), "n,lambda,multiplicity,residual,zeros");
    let rows = rows(&out);
    assert_eq!(rows.len(), 3);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        let lam: f64 = r[1].parse().unwrap();
        assert!((lam - ((i + 1) * (i + 1)) as f64).abs() < 1e-7);
        assert_eq!(r[2], "1");
        assert_eq!(r[4], i.to_string());
    }
}

#[test]
fn periodic_multiplicities() {
    let out = slq(&["solve", "--config", &config("periodic.json")]);
    assert!(out.status.success());
    let mult: Vec<String> = rows(&out).iter().map(|r| r[2].clone()).collect();
    assert_eq!(mult, ["1", "2", "2", "2", "2", "2", "2"]);
}

#[test]
fn zero_strength_transmission_reproduces_the_plain_table() {
    let plain = slq(&["solve", "--config", &config("dirichlet.json"), "--n-max", "8"]);
    let text = std::fs::read_to_string(configs().join("delta.json")).unwrap().replace("\"alpha\": 1.0", "\"alpha\": 0.0");
    let path = scratch("delta0.json");
    std::fs::write(&path, text).unwrap();
    let with = slq(&["solve", "--config", path.to_str().unwrap(), "--n-max", "8"]);
    assert!(plain.status.success() && with.status.success());
    assert_eq!(plain.stdout, with.stdout);
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    let first = slq(&["solve", "--config", &config("piecewise_coupled.json")]);
    let second = Command::new(env!("CARGO_BIN_EXE_slq"))
        .args(["solve", "--config", &config("piecewise_coupled.json")])
        .env("SLQ_THREADS", "1")
        .output()
        .unwrap();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_file_and_dumps() {
    let out = scratch("table.csv");
    let prefix = scratch("ef");
    let res = slq(&[
        "solve",
        "--config",
        &config("dirichlet.json"),
        "--out",
        out.to_str().unwrap(),
        "--dump",
        prefix.to_str().unwrap(),
        "--samples",
        "11",
    ]);
    assert!(res.status.success());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("n,lambda"));
    let dumps: Vec<_> = std::fs::read_dir(out.parent().unwrap())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("ef"))
        .collect();
    assert_eq!(dumps.len(), 5);
    let sample = std::fs::read_to_string(dumps[0].path()).unwrap();
    assert_eq!(sample.lines().count(), 12);
}

#[test]
fn configuration_errors_exit_with_two() {
    let bad_json = scratch("bad.json");
    std::fs::write(&bad_json, "{ \"interval\": [0, 1], ").unwrap();
    let out = slq(&["solve", "--config", bad_json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let bad_weight = scratch("weight.json");
    std::fs::write(
        &bad_weight,
        r#"{"interval":[0,1],"coefficients":{"inv_p":1,"q":0,"r":-1},"bc":{"type":"dirichlet"}}"#,
    )
    .unwrap();
    assert_eq!(slq(&["solve", "--config", bad_weight.to_str().unwrap()]).status.code(), Some(2));

    let bad_bc = scratch("bc.json");
    std::fs::write(
        &bad_bc,
        r#"{"interval":[0,1],"coefficients":{"inv_p":1,"q":0,"r":1},"bc":{"type":"coupled","gamma":0.5,"k":[[1,1],[1,1]]}}"#,
    )
    .unwrap();
    assert_eq!(slq(&["solve", "--config", bad_bc.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(slq(&["solve", "--config", "/nonexistent/slq.json"]).status.code(), Some(2));
}

#[test]
fn solver_failures_exit_with_three() {
    let out = slq(&["solve", "--config", &config("dirichlet.json"), "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver error"));
}

#[test]
fn alpha_beta_grid_scan() {
    let out = slq(&["scan", "--config", &config("dirichlet.json"), "--grid", "16x16", "--n-max", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 256);
    for r in &rows {
        assert!(r.iter().all(|v| !v.is_empty()));
        assert!(r.iter().skip(1).filter_map(|v| v.parse::<f64>().ok()).all(f64::is_finite));
    }
}

#[test]
fn gamma_sweep_follows_the_square_law() {
    let path = scratch("sweep.json");
    std::fs::write(
        &path,
        r#"{"interval":[0,3.141592653589793],"coefficients":{"inv_p":1,"q":0,"r":1},"bc":{"type":"periodic"},
            "solver":{"n_max":0},"scan":{"kind":"gamma_sweep","k":[[1,0],[0,1]],"count":7}}"#,
    )
    .unwrap();
    let out = slq(&["scan", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let header: Vec<String> = String::from_utf8_lossy(&out.stdout).lines().next().unwrap().split(',').map(str::to_owned).collect();
    let gi = header.iter().position(|h| h == "gamma").unwrap();
    let li = header.iter().position(|h| h.starts_with("lambda")).unwrap();
    for r in rows(&out) {
        let g: f64 = r[gi].parse().unwrap();
        let l: f64 = r[li].parse().unwrap();
        // On an interval of length π with K = I, λ₀(γ) = (γ/π)².
        let want = (g.abs() / std::f64::consts::PI).powi(2);
        assert!((l - want).abs() < 1e-7 * want.max(1.0), "γ = {g}: {l} vs {want}");
    }
}

#[test]
fn region_approach_scan_matches_the_dirichlet_limit() {
    let out = slq(&["scan", "--config", &config("approach.json")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&out);
    assert_eq!(rows.len(), 4);
    for r in rows {
        let n: usize = r[0].parse().unwrap();
        assert_eq!(r[1], (n - 2).to_string());
        assert_eq!(r[7], "true");
    }
}

#[test]
fn verify_suites() {
    let ok = slq(&["verify", "--config", &config("mollify.json"), "--suite", "mollify,oscillation,derivatives"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let chains = slq(&["verify", "--config", &config("piecewise_coupled.json"), "--suite", "chains,jumps,transmission"]);
    assert_eq!(chains.status.code(), Some(0), "{}", String::from_utf8_lossy(&chains.stdout));
    let summary = String::from_utf8_lossy(&chains.stdout);
    assert!(summary.lines().next().unwrap().starts_with("suite,"));
}
