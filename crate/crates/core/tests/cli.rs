use std::path::Path;
use std::process::{Command, Output};

fn ergolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn alpha_exact_rows() {
    let out = ergolab(&["alpha", "--n", "1", "--jmax", "4", "--backend", "exact"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "n,j,weight,backend\n1,0,1/2,exact\n1,1,1/8,exact\n1,2,1/16,exact\n1,3,5/128,exact\n"
    );
    let out = ergolab(&["alpha", "--n", "2", "--jmax", "1", "--backend", "exact"]);
    assert_eq!(stdout(&out), "n,j,weight,backend\n2,0,1/4,exact\n");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&ergolab(&["alpha", "--n", "0", "--jmax", "4"])), 2);
    assert_eq!(code(&ergolab(&["growth", "--p", "1"])), 2);
    assert_eq!(code(&ergolab(&["growth", "--nmax", "4"])), 2);
    assert_eq!(code(&ergolab(&["blowup", "--beta", "0.3"])), 2);
    assert_eq!(code(&ergolab(&["simulate", "--fn", "power:0.6"])), 2);
    assert_eq!(code(&ergolab(&["probe", "--c0", "0.5"])), 2);
    assert_eq!(code(&ergolab(&["nosuch"])), 2);
    assert_eq!(code(&ergolab(&[])), 2);
    assert_eq!(code(&ergolab(&["--help"])), 0);
    assert_eq!(code(&ergolab(&["--version"])), 0);
}

#[test]
fn resource_limits_exit_3() {
    let out = ergolab(&["alpha", "--n", "1", "--jmax", "5000", "--backend", "exact"]);
    assert_eq!(code(&out), 3);
    let out = Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(["growth", "--nmax", "32"])
        .env("ERGOLAB_MAX_J", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn sato_last_row() {
    let out = ergolab(&["sato", "--a", "1", "--nmax", "3", "--p", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let norm: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(norm, 10f64.sqrt());
}

#[test]
fn simulate_reference_case() {
    let out = ergolab(&["simulate", "--n", "2", "--trials", "10000", "--seed", "42"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "estimate,half_width,exact_mid,ok");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "0.25");
    assert_eq!(row[3], "true");
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn growth_reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = ergolab(&["growth", "--p", "2", "--nmax", "32", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    let csv = read(a.path(), "growth.csv");
    assert!(csv.starts_with("n,norm_fn,norm_Anfn_lower,ratio,upper_bound\n"));
    assert_eq!(csv.lines().count(), 33);
    assert_eq!(csv, read(b.path(), "growth.csv"));
    assert_eq!(read(a.path(), "growth.json"), read(b.path(), "growth.json"));
    let json: serde_json::Value = serde_json::from_str(&read(a.path(), "growth.json")).unwrap();
    assert_eq!(json["schemaVersion"], 1);
    let slope = json["summary"]["slope"].as_f64().unwrap();
    assert!((0.425..=0.575).contains(&slope));
    assert!(json["verdicts"].as_array().unwrap().iter().all(|v| v["pass"] == true));
    assert!(json.get("wallTimeSeconds").is_none());
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = ergolab(&["maximal", "--timing", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "maximal.json")).unwrap();
    assert!(json["wallTimeSeconds"].as_f64().unwrap() >= 0.0);
    assert!(read(dir.path(), "maximal.csv").starts_with("m,ratio\n"));
}

#[test]
fn other_command_headers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (args, file, header) in [
        (vec!["blowup", "--nmax", "8"], "blowup.csv", "n,E_lower,norm_lower\n"),
        (vec!["probe", "--nmax", "6", "--jmax", "200"], "probe.csv", "n,j,ratio\n"),
        (vec!["sato", "--nmax", "5"], "sato.csv", "n,norm\n"),
    ] {
        let mut full = args.clone();
        full.extend(["--out", d]);
        assert_eq!(code(&ergolab(&full)), 0, "{args:?}");
        assert!(read(dir.path(), file).starts_with(header));
    }
}

#[test]
fn verify_core_and_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&ergolab(&["verify", "--suite", "core", "--out", d])), 0);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "verify.json")).unwrap();
    assert!(json["verdicts"].as_array().unwrap().iter().all(|v| v["pass"] == true));

    let out = ergolab(&["verify", "--suite", "core", "--perturb", "1e-9", "--out", d]);
    assert_eq!(code(&out), 1);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "verify.json")).unwrap();
    let failed: Vec<&str> = json["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["pass"] == false)
        .map(|v| v["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["backend_agreement"]);
}
