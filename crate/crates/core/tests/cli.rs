use std::path::Path;
use std::process::{Command, Output};

fn avloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avloop")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn session_path(stdout: &str) -> String {
    stdout.lines().find_map(|l| l.strip_prefix("path ")).unwrap().to_string()
}

#[test]
fn synth_simulate_export_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let proj = dir.path().join("clip");
    let p = proj.to_str().unwrap();
    let o = avloop(&["synth", "--frames", "40", "--changes", "2", "--seed", "7", p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(proj.join("project.json").exists());

    let o = avloop(&["simulate", "--policy", "perfect", "--seed", "1", p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = text(&o);
    assert!(out.contains("requested frames [0,"), "{out}");
    let session = session_path(&out);
    assert!(Path::new(&session).join("log.jsonl").exists());
    assert!(!Path::new(&session).join("lock").exists());

    let export_file = dir.path().join("export.json");
    let o = avloop(&["export", &session, "-o", export_file.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let exported: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&export_file).unwrap()).unwrap();
    assert_eq!(exported.as_array().unwrap().len(), 40);

    let truth = proj.join("ground_truth.json");
    let o = avloop(&["evaluate", "--truth", truth.to_str().unwrap(), "--format", "json", &session]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value = serde_json::from_str(&text(&o)).unwrap();
    assert_eq!(stats["mean_ciou"], 1.0);
    assert_eq!(stats["n_frames"], 40);
}

#[test]
fn noisy_policy_runs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    assert_eq!(code(&avloop(&["synth", "--frames", "30", "--changes", "1", "--seed", "2", p])), 0);
    let o = avloop(&["simulate", "--policy", "noisy", "--seed", "4", p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(text(&o).contains("mean cIoU"), "{}", text(&o));
}

#[test]
fn validation_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    assert_eq!(code(&avloop(&["ingest", p])), 1);
    assert_eq!(code(&avloop(&["synth", "--frames", "0", p])), 1);
    assert_eq!(code(&avloop(&["synth", "--frames", "10", "--changes", "10", p])), 1);
    assert_eq!(code(&avloop(&["frobnicate"])), 1);
    assert_eq!(code(&avloop(&["simulate", "--policy", "sloppy", p])), 1);
    assert_eq!(code(&avloop(&["synth", "--frames", "10", p])), 0);
    assert_eq!(code(&avloop(&["simulate", "--jitter", "-1", p])), 1);
    std::fs::remove_file(dir.path().join("ground_truth.json")).unwrap();
    assert_eq!(code(&avloop(&["simulate", p])), 1);
}

#[test]
fn evaluate_checks_its_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    assert_eq!(code(&avloop(&["synth", "--frames", "12", p])), 0);
    let session = session_path(&text(&avloop(&["simulate", p])));
    let truth = dir.path().join("ground_truth.json");
    let t = truth.to_str().unwrap();
    assert_eq!(code(&avloop(&["evaluate", "--truth", t, "--consensus", "0", &session])), 1);
    assert_eq!(code(&avloop(&["evaluate", "--truth", "/nonexistent.json", &session])), 1);
    let o = avloop(&["evaluate", "--truth", t, "--truth", t, "--consensus", "2", &session]);
    assert_eq!(code(&o), 0);
    assert!(text(&o).contains("mean cIoU"));
}

#[test]
fn runtime_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().to_str().unwrap();
    assert_eq!(code(&avloop(&["synth", "--frames", "12", p])), 0);
    let sessions = dir.path().join("sessions/missing");
    assert_eq!(code(&avloop(&["export", sessions.to_str().unwrap()])), 2);
    // A port that is already taken.
    let busy = std::net::TcpListener::bind("0.0.0.0:0").unwrap();
    let port = busy.local_addr().unwrap().port().to_string();
    assert_eq!(code(&avloop(&["serve", "--port", &port, p])), 2);
}
