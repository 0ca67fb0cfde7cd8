//! Serve a synthetic project and talk to it over the in-process client.
//! Pass `--listen` to keep a real server running on port 8080.

use serde_json::json;

use avloop::service::{serve, LocalClient, ServiceConfig};
use avloop::store::ingest;
use avloop::synth::{synth, SynthConfig};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    synth(&SynthConfig { n_frames: 24, seed: 2, ..Default::default() }, dir.path())?;
    let pid = ingest(dir.path())?.id;

    if std::env::args().any(|a| a == "--listen") {
        let cfg = ServiceConfig { data_dir: dir.path().to_path_buf(), ..ServiceConfig::default() };
        println!("project {pid} on http://localhost:{}/api/v1/projects", cfg.port);
        return tokio::runtime::Runtime::new()?.block_on(serve(cfg));
    }

    let client = LocalClient::open(dir.path())?;
    let (status, created) = client.request("POST", &format!("/api/v1/projects/{pid}/sessions"), Some(&json!({})));
    println!("POST sessions -> {status}: {created}");
    let sid = created["session_id"].as_str().expect("session id");
    let (_, frame) = client.request("GET", &format!("/api/v1/sessions/{sid}/frames/0"), None);
    println!("candidates at frame 0: {}", frame["candidates"]);
    let first = frame["candidates"][0]["id"].clone();
    let label = frame["suggested_sound_labels"][0].clone();
    let body = json!({"revision": 0, "items": [{"detection_id": first, "sound_label": label}]});
    let (status, decision) = client.request("PUT", &format!("/api/v1/sessions/{sid}/frames/0/annotation"), Some(&body));
    println!("PUT annotation -> {status}: {decision}");
    Ok(())
}
