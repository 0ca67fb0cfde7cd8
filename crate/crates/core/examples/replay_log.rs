//! Persist a session, then rebuild it from its operation log alone.

use std::sync::Arc;

use avloop::scheduler::SessionMode;
use avloop::session::{session_dir, Session};
use avloop::sim::{simulate_session, SimAnnotatorPolicy};
use avloop::store::{ingest, read_log, LoadedProject};
use avloop::synth::{synth, SynthConfig};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    synth(&SynthConfig { n_frames: 40, n_changes: 2, seed: 6, ..Default::default() }, dir.path())?;
    ingest(dir.path())?;
    let loaded = LoadedProject::open(dir.path())?;
    let truth = loaded.ground_truth()?.expect("synth writes ground truth");
    let shared = Arc::new(loaded.project.clone());

    let mut s = Session::create(&loaded, shared.clone(), SessionMode::Guided)?;
    simulate_session(&mut s, &truth, SimAnnotatorPolicy::noisy(1))?;
    let (id, hash) = (s.id().to_string(), s.state_hash());
    drop(s);

    let records = read_log(&session_dir(&loaded, &id))?;
    for r in records.iter().take(6) {
        println!("#{:<3} {:?} {:?} {}", r.seq, r.actor, r.op, r.payload);
    }
    println!("... {} records", records.len());
    let back = Session::open(&loaded, shared, &id, false)?;
    println!("state hash {hash}\nreplayed   {}", back.state_hash());
    assert_eq!(hash, back.state_hash());
    Ok(())
}
