//! Interpolate between two agreeing keyframes and watch the audio gate refuse
//! the frames where the sound is not heard.

use avloop::model::{AudioTag, AnnotationItem, BoundingBox, DetectedObject, DetectionId, FrameDims, FrameRecord, MatchPolicy, Project, SoundingAnnotation, Target};
use avloop::propagation::populate;
use avloop::scheduler::SessionState;

fn main() -> anyhow::Result<()> {
    let frames = (0..8)
        .map(|i| FrameRecord {
            index: i,
            timestamp_ms: i as u64 * 125,
            image_ref: format!("frames/{i:06}.png"),
            detections: vec![DetectedObject {
                id: DetectionId(0),
                bbox: BoundingBox { x: 10.0 + 2.0 * i as f64, y: 20.0, w: 30.0, h: 24.0 },
                class_label: "dog".into(),
                confidence: 0.9,
            }],
            // The dog is quiet at frames 3 and 4.
            audio_tags: vec![AudioTag { label: "bark".into(), confidence: if i == 3 || i == 4 { 0.2 } else { 0.9 } }],
        })
        .collect();
    let project = Project { dims: FrameDims { width: 96, height: 64 }, fps: 8, policy: MatchPolicy::default(), frames };
    let bark = |f| SoundingAnnotation::new(f, vec![AnnotationItem::human(Target::DetectionId(DetectionId(0)), "bark")]);

    let mut state = SessionState::new(8);
    state.on_human_annotation(&project, 0, bark(0))?;
    state.on_human_annotation(&project, 7, bark(7))?;
    // The scheduler already filled (0, 7); start over to call populate directly.
    let mut fresh = SessionState::new(8);
    fresh.annotations[0] = state.annotations[0].clone();
    fresh.annotations[7] = state.annotations[7].clone();
    fresh.keyframes.extend([0, 7]);
    let out = populate(&mut fresh, &project, 0, 7)?;
    for (f, ann) in &out.annotated {
        let (b, label, prov) = ann.resolved(&project.frames[*f]).next().expect("one item");
        println!("frame {f}: {label} at x={} ({})", b.x, prov.as_str());
    }
    println!("skipped by the audio gate: {:?}", out.skipped);
    Ok(())
}
