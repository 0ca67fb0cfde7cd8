//! A simulated annotator working through a guided and a manual session.

use std::sync::Arc;

use avloop::scheduler::SessionMode;
use avloop::session::Session;
use avloop::sim::{simulate_session, SimAnnotatorPolicy};
use avloop::synth::{generate, SynthConfig};

fn main() -> anyhow::Result<()> {
    let clip = generate(&SynthConfig { n_frames: 80, n_changes: 3, miss_rate: 0.05, seed: 12, ..Default::default() })?;
    let project = Arc::new(clip.project);
    for (mode, policy) in [
        (SessionMode::Guided, SimAnnotatorPolicy::perfect(0)),
        (SessionMode::Guided, SimAnnotatorPolicy::noisy(0)),
        (SessionMode::Manual, SimAnnotatorPolicy::noisy(0)),
    ] {
        let mut s = Session::in_memory("demo", "demo", project.clone(), mode);
        let (stats, out) = simulate_session(&mut s, &clip.ground_truth, policy.clone())?;
        println!(
            "{mode:?} jitter {} wrong-pick {}: {} human frames, {:.1}% automatic, mean cIoU {:.3}",
            policy.box_jitter_px,
            policy.wrong_pick_prob,
            out.requested.len(),
            100.0 * stats.automation_fraction(),
            stats.mean_ciou.unwrap_or(0.0)
        );
    }
    Ok(())
}
