use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tefdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tefdyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn render_writes_pgm_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("fig.pgm");
    let out = tefdyn(&[
        "render",
        "--map",
        "f2",
        "--viewport",
        "-3,9,-13,13",
        "--size",
        "64x48",
        "--out",
        path(&img),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let bytes = fs::read(&img).unwrap();
    let header = b"P5\n64 48\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 64 * 48);
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("fig.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["map"], "f2");
    assert_eq!(meta["budget"], 500);
    assert_eq!(meta["classifier"], "basins");
}

#[test]
fn render_bytes_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.png");
    let b = dir.path().join("b.png");
    for (file, threads) in [(&a, "1"), (&b, "4")] {
        let out = tefdyn(&[
            "render",
            "--map",
            "f3",
            "--size",
            "40x40",
            "--threads",
            threads,
            "--out",
            path(file),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(&fs::read(&a).unwrap()[1..4], b"PNG");
}

#[test]
fn instability_json() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("lam.json");
    let out = tefdyn(&[
        "instability",
        "--p",
        "1",
        "--n",
        "1000",
        "--delta",
        "0.01",
        "--out",
        path(&file),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&file).unwrap()).unwrap();
    let re = json["lambda0_re"].as_f64().unwrap();
    let im = json["lambda0_im"].as_f64().unwrap();
    assert!((re - 1.00025).hypot(im - 0.00171) < 5e-4);
    assert!(json["winding"].as_i64().unwrap() >= 1);
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("lam.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "instability");
    assert_eq!(meta["args"]["delta"], 0.01);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(tefdyn(&["eta-scan", "--map", "bogus"]).status.code(), Some(2));
    assert_eq!(tefdyn(&["render", "--map", "f2"]).status.code(), Some(2));
    assert_eq!(
        tefdyn(&["trace-branch", "--map", "f1", "--z0", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(tefdyn(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn computational_errors_exit_1_with_one_line() {
    let out = tefdyn(&["instability", "--delta", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error kind=NoRootInDisc message="), "{err}");
}

#[test]
fn config_file_with_flags_winning() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"map": "model-F1", "radii": [0.1, 0.5]}"#).unwrap();
    let file = dir.path().join("cert.json");
    let out = tefdyn(&["certify", "--config", path(&cfg), "--out", path(&file)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&file).unwrap()).unwrap();
    assert_eq!(json["status"], "Certified");
    assert_eq!(json["radius"], 0.5);
    let out = tefdyn(&["certify", "--config", path(&cfg), "--map", "f1", "--out", path(&file)]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&file).unwrap()).unwrap();
    assert_eq!(json["status"], "FailedUnboundedS");
    fs::write(&cfg, r#"{"map": "nope"}"#).unwrap();
    assert_eq!(tefdyn(&["certify", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn scans_are_repeatable() {
    let run = || tefdyn(&["eta-scan", "--map", "lambda-exp:0.25,0", "--thresholds", "1e2,1e4"]).stdout;
    let first = run();
    assert_eq!(first, run());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("R,infimum,witness_re,witness_im,samples\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn report_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = tefdyn(&["report", "--out-dir", path(a.path())]);
    let rb = tefdyn(&["report", "--out-dir", path(b.path())]);
    let sa = fs::read_to_string(a.path().join("summary.csv")).unwrap();
    let sb = fs::read_to_string(b.path().join("summary.csv")).unwrap();
    assert_eq!(sa, sb);
    assert_eq!(sa.lines().count(), 13);
    let all_pass = sa.lines().skip(1).all(|l| l.contains(",PASS,"));
    assert_eq!(ra.status.success(), all_pass);
    assert_eq!(ra.status.code(), rb.status.code());
}

#[test]
fn report_into_unwritable_location_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("not-a-dir");
    fs::write(&file, "x").unwrap();
    let out = tefdyn(&["report", "--out-dir", path(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error kind=IOError"), "{}", stderr(&out));
}
