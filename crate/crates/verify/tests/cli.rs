use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn verify(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("verify runs")
}

fn quick() -> Vec<&'static str> {
    vec!["--s", "0.5", "--nmax", "4", "--nodes", "61"]
}

#[test]
fn passing_suite_exits_zero_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["orthonormal"];
    args.extend(quick());
    let out = verify(&args, dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("orthonormal.json")).unwrap())
            .unwrap();
    assert_eq!(json["suite"], "orthonormal");
    assert_eq!(json["pass"], true);
    assert_eq!(json["config"]["n_max"], 4);
    assert!(json["checks"][0]["cases"].as_array().unwrap().len() >= 2);
    assert!(json.get("wall_time").is_none());
}

#[test]
fn reports_are_byte_identical_on_rerun() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut args = vec!["ellipse"];
    args.extend(quick());
    args.extend(["--seed", "7"]);
    verify(&args, a.path());
    verify(&args, b.path());
    let ra = fs::read(a.path().join("ellipse.json")).unwrap();
    let rb = fs::read(b.path().join("ellipse.json")).unwrap();
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
}

#[test]
fn csv_summary_has_one_row_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["orthonormal", "--format", "csv"];
    args.extend(quick());
    let out = verify(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["suite", "check", "case_id", "residual", "tolerance", "pass"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() >= 3);
    assert!(rows
        .iter()
        .all(|r| &r[0] == "orthonormal" && &r[5] == "true"));
}

#[test]
fn failing_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    fs::write(
        &cfg,
        "s_values = [0.5]\nN_max = 3\nnodes = 61\n[tolerances]\n\"orthonormal.gram\" = 1e-30\n",
    )
    .unwrap();
    let out = verify(
        &["orthonormal", "--config", cfg.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "colour = \"blue\"\n",
        "N_max = 25\n",
        "s_values = [1.5]\n",
        "[tolerances]\n\"reproduce.bogus\" = 1e-3\n",
        "[tolerances]\nkernels = -1.0\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.toml"));
        fs::write(&cfg, text).unwrap();
        let out = verify(
            &["kernels", "--config", cfg.to_str().unwrap()],
            &dir.path().join("out"),
        );
        assert_eq!(out.status.code(), Some(2), "{text}");
    }
    let out = verify(
        &["kernels", "--config", "/nonexistent/verify.toml"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = verify(&["kernels", "--nmax", "30"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}
