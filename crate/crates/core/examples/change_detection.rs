//! Visual and auditory change between frames, and the distance-decaying overlap test.

use avloop::change::audio_visual_change;
use avloop::matching::{condition1_holds, correspondence_threshold};
use avloop::model::{BoundingBox, MatchPolicy};
use avloop::synth::{generate, SynthConfig};

fn main() -> anyhow::Result<()> {
    let policy = MatchPolicy::default();
    let a = BoundingBox { x: 0.0, y: 0.0, w: 10.0, h: 10.0 };
    for d in 1..=5 {
        let moved = a.translated(d as f64, 0.0);
        println!(
            "d={d}: threshold {:>5}  overlap {:>5}  same object: {}",
            correspondence_threshold(&a, d, &policy),
            avloop::matching::overlap_area(&a, &moved),
            condition1_holds(&a, &moved, 0, d, &policy)?
        );
    }

    let clip = generate(&SynthConfig { n_frames: 30, change_points: Some(vec![12]), miss_rate: 0.1, seed: 8, ..Default::default() })?;
    let frames = &clip.project.frames;
    for t in 1..20 {
        let r = audio_visual_change(&frames[0], &frames[t], &policy);
        if r.changed() {
            println!("frame 0 -> {t}: {}", r.reasons.join(", "));
        }
    }
    Ok(())
}
