//! Visual and auditory change detection between a source frame and a later target frame.

use serde::{Deserialize, Serialize};

use crate::matching::condition1_holds;
use crate::model::{FrameRecord, MatchPolicy};

pub const REASON_OBJECT_COUNT: &str = "object-count";
pub const REASON_LOST_CORRESPONDENCE: &str = "lost-correspondence";
pub const REASON_TAG_SET_DELTA: &str = "tag-set-delta";
pub const REASON_LOW_CONFIDENCE: &str = "low-confidence";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeReport {
    pub visual_changed: bool,
    pub auditory_changed: bool,
    pub reasons: Vec<String>,
}

impl ChangeReport {
    pub fn changed(&self) -> bool {
        self.visual_changed || self.auditory_changed
    }
}

fn visual_reasons(src: &FrameRecord, target: &FrameRecord, policy: &MatchPolicy) -> Vec<&'static str> {
    let mut reasons = Vec::new();
    if src.detections.len() != target.detections.len() {
        reasons.push(REASON_OBJECT_COUNT);
    }
    if target.index > src.index {
        let lost = src.detections.iter().any(|s| {
            !target.detections.iter().any(|t| {
                condition1_holds(&s.bbox, &t.bbox, src.index, target.index, policy).unwrap_or(false)
            })
        });
        if lost {
            reasons.push(REASON_LOST_CORRESPONDENCE);
        }
    }
    reasons
}

fn auditory_reasons(src: &FrameRecord, target: &FrameRecord, policy: &MatchPolicy) -> Vec<&'static str> {
    let mut reasons = Vec::new();
    if src.confident_tags(policy.tag_threshold) != target.confident_tags(policy.tag_threshold) {
        reasons.push(REASON_TAG_SET_DELTA);
    }
    // An empty tag list is silence, not uncertainty.
    let best = target.audio_tags.iter().map(|t| t.confidence).fold(None, |m: Option<f64>, c| {
        Some(m.map_or(c, |m| m.max(c)))
    });
    if best.is_some_and(|b| b < policy.tag_threshold) {
        reasons.push(REASON_LOW_CONFIDENCE);
    }
    reasons
}

/// Detected-object count differs, or some source box has no corresponding target box.
pub fn visual_change(src: &FrameRecord, target: &FrameRecord, policy: &MatchPolicy) -> bool {
    !visual_reasons(src, target, policy).is_empty()
}

/// Thresholded tag sets differ, or the target's best tag falls below the threshold.
pub fn auditory_change(src: &FrameRecord, target: &FrameRecord, policy: &MatchPolicy) -> bool {
    !auditory_reasons(src, target, policy).is_empty()
}

pub fn audio_visual_change(src: &FrameRecord, target: &FrameRecord, policy: &MatchPolicy) -> ChangeReport {
    let visual = visual_reasons(src, target, policy);
    let auditory = auditory_reasons(src, target, policy);
    ChangeReport {
        visual_changed: !visual.is_empty(),
        auditory_changed: !auditory.is_empty(),
        reasons: visual.into_iter().chain(auditory).map(String::from).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AudioTag, BoundingBox, DetectedObject, DetectionId};

    fn frame(index: usize, boxes: &[(f64, f64, f64, f64)], tags: &[(&str, f64)]) -> FrameRecord {
        FrameRecord {
            index,
            timestamp_ms: 0,
            image_ref: String::new(),
            detections: boxes
                .iter()
                .enumerate()
                .map(|(i, &(x, y, w, h))| DetectedObject {
                    id: DetectionId(i as u32),
                    bbox: BoundingBox { x, y, w, h },
                    class_label: "dog".into(),
                    confidence: 0.9,
                })
                .collect(),
            audio_tags: tags
                .iter()
                .map(|(l, c)| AudioTag { label: l.to_string(), confidence: *c })
                .collect(),
        }
    }

    #[test]
    fn identical_frames_do_not_change() {
        let p = MatchPolicy::default();
        let a = frame(0, &[(0.0, 0.0, 10.0, 10.0)], &[("dog", 0.9)]);
        let b = FrameRecord { index: 1, ..a.clone() };
        assert!(!visual_change(&a, &b, &p));
        assert!(!auditory_change(&a, &b, &p));
        assert_eq!(audio_visual_change(&a, &b, &p), ChangeReport::default());
    }

    #[test]
    fn object_count_change_is_visual() {
        let p = MatchPolicy::default();
        let a = frame(0, &[(0.0, 0.0, 10.0, 10.0), (20.0, 0.0, 10.0, 10.0)], &[("dog", 0.9)]);
        let b = frame(
            1,
            &[(0.0, 0.0, 10.0, 10.0), (20.0, 0.0, 10.0, 10.0), (40.0, 0.0, 10.0, 10.0)],
            &[("dog", 0.9)],
        );
        assert!(visual_change(&a, &b, &p));
        let r = audio_visual_change(&a, &b, &p);
        assert_eq!((r.visual_changed, r.auditory_changed), (true, false));
        assert_eq!(r.reasons, vec![REASON_OBJECT_COUNT.to_string()]);
    }

    #[test]
    fn lost_correspondence_is_visual() {
        let p = MatchPolicy::default();
        let a = frame(0, &[(0.0, 0.0, 10.0, 10.0)], &[]);
        let b = frame(1, &[(40.0, 0.0, 10.0, 10.0)], &[]);
        let r = audio_visual_change(&a, &b, &p);
        assert!(r.visual_changed);
        assert_eq!(r.reasons, vec![REASON_LOST_CORRESPONDENCE.to_string()]);
    }

    #[test]
    fn new_confident_tag_is_auditory() {
        let p = MatchPolicy::default();
        let a = frame(0, &[], &[("dog", 0.9)]);
        let b = frame(1, &[], &[("dog", 0.9), ("siren", 0.7)]);
        assert!(auditory_change(&a, &b, &p));
        // Sub-threshold additions are ignored.
        let c = frame(1, &[], &[("dog", 0.9), ("siren", 0.2)]);
        assert!(!auditory_change(&a, &c, &p));
    }

    #[test]
    fn low_confidence_target_requests_help() {
        let p = MatchPolicy::default();
        let a = frame(0, &[], &[("dog", 0.3)]);
        let b = frame(1, &[], &[("dog", 0.3)]);
        let r = audio_visual_change(&a, &b, &p);
        assert!(r.auditory_changed);
        assert_eq!(r.reasons, vec![REASON_LOW_CONFIDENCE.to_string()]);
        // Silence on both sides is not uncertain.
        assert!(!auditory_change(&frame(0, &[], &[]), &frame(1, &[], &[]), &p));
    }

    #[test]
    fn both_modalities() {
        let p = MatchPolicy::default();
        let a = frame(0, &[(0.0, 0.0, 10.0, 10.0)], &[("dog", 0.9)]);
        let b = frame(1, &[], &[("siren", 0.9)]);
        let r = audio_visual_change(&a, &b, &p);
        assert!(r.visual_changed && r.auditory_changed);
        assert_eq!(r.reasons, vec![REASON_OBJECT_COUNT, REASON_LOST_CORRESPONDENCE, REASON_TAG_SET_DELTA]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reasons_nonempty_iff_changed(
                xs in prop::collection::vec((0.0..50.0f64, 0.0..50.0f64, 1.0..20.0f64, 1.0..20.0f64), 0..3),
                ys in prop::collection::vec((0.0..50.0f64, 0.0..50.0f64, 1.0..20.0f64, 1.0..20.0f64), 0..3),
                ta in 0.0..1.0f64, tb in 0.0..1.0f64, gap in 1usize..12,
            ) {
                let p = MatchPolicy::default();
                let a = frame(0, &xs, &[("dog", ta)]);
                let b = frame(gap, &ys, &[("dog", tb)]);
                let r = audio_visual_change(&a, &b, &p);
                prop_assert_eq!(r.reasons.is_empty(), !r.changed());
                let same = FrameRecord { index: gap, ..a.clone() };
                if ta >= p.tag_threshold {
                    prop_assert!(!audio_visual_change(&a, &same, &p).changed());
                }
            }

            #[test]
            fn correspondence_survives_longer_gaps(
                x in 0.0..10.0f64, w in 5.0..20.0f64, d in 1usize..14,
            ) {
                // Same geometry, same count: if unchanged at d, unchanged at d + 1.
                let p = MatchPolicy::default();
                let a = frame(0, &[(0.0, 0.0, 10.0, 10.0)], &[]);
                let near = frame(d, &[(x, 0.0, w, 10.0)], &[]);
                let far = frame(d + 1, &[(x, 0.0, w, 10.0)], &[]);
                if !visual_change(&a, &near, &p) {
                    prop_assert!(!visual_change(&a, &far, &p));
                }
            }
        }
    }
}
