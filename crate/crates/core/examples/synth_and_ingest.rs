//! Generate a synthetic clip on disk, ingest it, and look at what came out.
//!
//!     cargo run --example synth_and_ingest -- /tmp/clip

use std::path::PathBuf;

use avloop::store::{ingest, LoadedProject};
use avloop::synth::{synth, SynthConfig};

fn main() -> anyhow::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("avloop-clip"));
    let cfg = SynthConfig { n_frames: 48, n_changes: 2, miss_rate: 0.05, seed: 3, ..Default::default() };
    let clip = synth(&cfg, &dir)?;
    let manifest = ingest(&dir)?;
    println!("{} -> project {}", dir.display(), manifest.id);
    println!("{} frames, {}x{} at {} fps", manifest.n_frames, manifest.dims.width, manifest.dims.height, manifest.fps);
    println!("change points {:?}, {} missed detections", clip.change_points, clip.missed_boxes());

    let loaded = LoadedProject::open(&dir)?;
    for f in loaded.project.frames.iter().take(3) {
        let tags: Vec<String> = f.audio_tags.iter().map(|t| format!("{}@{:.2}", t.label, t.confidence)).collect();
        println!("frame {} t={}ms: {} detections, tags {}", f.index, f.timestamp_ms, f.detections.len(), tags.join(" "));
    }
    Ok(())
}
