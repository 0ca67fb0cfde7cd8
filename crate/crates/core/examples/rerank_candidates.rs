//! The re-ranker puts detections whose class has co-occurred with the heard
//! sounds first.

use avloop::model::{AnnotationItem, AudioTag, BoundingBox, DetectedObject, DetectionId, FrameRecord, SoundingAnnotation, Target};
use avloop::perception::{rank_candidates, RerankerModel};

fn main() {
    let det = |id, class: &str, confidence| DetectedObject {
        id: DetectionId(id),
        bbox: BoundingBox { x: 10.0 * f64::from(id), y: 0.0, w: 8.0, h: 8.0 },
        class_label: class.into(),
        confidence,
    };
    let frame = FrameRecord {
        index: 0,
        timestamp_ms: 0,
        image_ref: "frames/000000.png".into(),
        detections: vec![det(0, "person", 0.95), det(1, "guitar", 0.7), det(2, "dog", 0.8)],
        audio_tags: vec![AudioTag { label: "strum".into(), confidence: 0.9 }],
    };
    let show = |model: &RerankerModel| {
        let order: Vec<String> = rank_candidates(&frame.detections, &frame.audio_tags, model, 0.5)
            .iter()
            .map(|d| d.class_label.clone())
            .collect();
        println!("{}", order.join(" > "));
    };

    let mut model = RerankerModel::default();
    show(&model);
    let picked = SoundingAnnotation::new(0, vec![AnnotationItem::human(Target::DetectionId(DetectionId(1)), "strum")]);
    model.learn(&picked, &frame);
    show(&model);
}
