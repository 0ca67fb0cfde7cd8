//! Drive the keyframe scheduler by hand and print every decision it makes.

use avloop::model::{AnnotationItem, DetectionId, SoundingAnnotation, Target};
use avloop::scheduler::SessionState;
use avloop::synth::{generate, SynthConfig};

fn main() -> anyhow::Result<()> {
    let clip = generate(&SynthConfig { n_frames: 40, change_points: Some(vec![23]), seed: 1, ..Default::default() })?;
    let project = &clip.project;
    let mut state = SessionState::new(project.n_frames());

    let mut next = state.initial_step();
    while let Some(f) = next.frame() {
        // Answer from ground truth: the sounding object's detection and its sound.
        let items = clip.ground_truth[f]
            .items
            .iter()
            .map(|it| {
                let id = project.frames[f].detections.iter().find(|d| d.bbox == it.bbox).map(|d| d.id);
                let target = id.map_or(Target::CustomBox(it.bbox), |id: DetectionId| Target::DetectionId(id));
                AnnotationItem::human(target, it.sound_label.clone())
            })
            .collect();
        let d = state.on_human_annotation(project, f, SoundingAnnotation::new(f, items))?;
        println!(
            "annotated {f:>2}  populated {:?}  stack {:?}  next {:?}",
            d.populated, state.right_bound_stack, d.next.frame()
        );
        next = d.next;
    }
    println!("change at {:?}; {} of {} frames asked", clip.change_points, state.keyframes.len(), project.n_frames());
    Ok(())
}
