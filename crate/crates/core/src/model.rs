//! Domain types shared by the engine, the store and the service.
//!
//! Everything here is a plain value type. Behavior is limited to
//! construction, validation and the annotation equality test used by the
//! scheduler's predict-select-compare step.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default resampling rate for ingested video.
pub const DEFAULT_FPS: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("box has non-positive size ({w}x{h})")]
    EmptyBox { w: f64, h: f64 },
    #[error("box coordinate is not finite")]
    NonFinite,
    #[error("box lies entirely outside the {width}x{height} frame")]
    OutsideFrame { width: u32, height: u32 },
    #[error("confidence {0} is outside [0, 1]")]
    Confidence(f64),
    #[error("duplicate detection id {0} in frame {1}")]
    DuplicateDetection(u32, usize),
    #[error("duplicate audio tag {0:?} in frame {1}")]
    DuplicateTag(String, usize),
    #[error("annotation for frame {0} targets the same object twice")]
    DuplicateTarget(usize),
    #[error("annotation references unknown detection {id} in frame {frame}")]
    UnknownDetection { id: u32, frame: usize },
    #[error("invalid match policy: {0}")]
    Policy(&'static str),
}

/// Axis-aligned rectangle in pixel coordinates: left edge, top edge, width, height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, ModelError> {
        let b = Self { x, y, w, h };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if ![self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        if self.w <= 0.0 || self.h <= 0.0 {
            return Err(ModelError::EmptyBox { w: self.w, h: self.h });
        }
        Ok(())
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Intersection-over-union with another box.
    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let inter = crate::matching::overlap_area(self, other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    /// Clip to `[0, width] x [0, height]`. Fails when nothing is left.
    pub fn clamp_to(&self, width: u32, height: u32) -> Result<BoundingBox, ModelError> {
        self.validate()?;
        let (fw, fh) = (f64::from(width), f64::from(height));
        let x0 = self.x.clamp(0.0, fw);
        let y0 = self.y.clamp(0.0, fh);
        let x1 = self.right().clamp(0.0, fw);
        let y1 = self.bottom().clamp(0.0, fh);
        if x1 - x0 <= 0.0 || y1 - y0 <= 0.0 {
            return Err(ModelError::OutsideFrame { width, height });
        }
        Ok(BoundingBox { x: x0, y: y0, w: x1 - x0, h: y1 - y0 })
    }

    /// Same box shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> BoundingBox {
        BoundingBox { x: self.x + dx, y: self.y + dy, ..*self }
    }
}

/// Ingest-assigned detection identifier, stable for the project's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DetectionId(pub u32);

impl fmt::Display for DetectionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "det {}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedObject {
    pub id: DetectionId,
    #[serde(rename = "box", with = "box_array")]
    pub bbox: BoundingBox,
    #[serde(rename = "label")]
    pub class_label: String,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioTag {
    pub label: String,
    pub confidence: f64,
}

/// Frame dimensions in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDims {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub index: usize,
    pub timestamp_ms: u64,
    pub image_ref: String,
    pub detections: Vec<DetectedObject>,
    pub audio_tags: Vec<AudioTag>,
}

impl FrameRecord {
    pub fn detection(&self, id: DetectionId) -> Option<&DetectedObject> {
        self.detections.iter().find(|d| d.id == id)
    }

    /// Labels of tags whose confidence reaches `threshold`.
    pub fn confident_tags(&self, threshold: f64) -> BTreeSet<&str> {
        self.audio_tags
            .iter()
            .filter(|t| t.confidence >= threshold)
            .map(|t| t.label.as_str())
            .collect()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut ids = BTreeSet::new();
        for d in &self.detections {
            d.bbox.validate()?;
            check_confidence(d.confidence)?;
            if !ids.insert(d.id) {
                return Err(ModelError::DuplicateDetection(d.id.0, self.index));
            }
        }
        let mut labels = BTreeSet::new();
        for t in &self.audio_tags {
            check_confidence(t.confidence)?;
            if !labels.insert(t.label.as_str()) {
                return Err(ModelError::DuplicateTag(t.label.clone(), self.index));
            }
        }
        Ok(())
    }
}

fn check_confidence(c: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(ModelError::Confidence(c))
    }
}

/// Timestamp of frame `index` at `fps`, rounded to the nearest millisecond.
pub fn frame_timestamp_ms(index: usize, fps: u32) -> u64 {
    (index as f64 * 1000.0 / f64::from(fps)).round() as u64
}

/// What an annotation item points at: a detector candidate or a human-drawn box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    DetectionId(DetectionId),
    CustomBox(BoundingBox),
}

impl Target {
    /// Geometry of the target within `frame`.
    pub fn resolve(&self, frame: &FrameRecord) -> Option<BoundingBox> {
        match self {
            Target::DetectionId(id) => frame.detection(*id).map(|d| d.bbox),
            Target::CustomBox(b) => Some(*b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Human,
    Auto,
    AutoModified,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Human => "human",
            Provenance::Auto => "auto",
            Provenance::AutoModified => "auto_modified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationItem {
    pub target: Target,
    pub sound_label: String,
    pub provenance: Provenance,
}

impl AnnotationItem {
    pub fn human(target: Target, sound_label: impl Into<String>) -> Self {
        Self { target, sound_label: sound_label.into(), provenance: Provenance::Human }
    }
}

/// All sounding objects of one frame. An empty item list is a silent frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundingAnnotation {
    pub frame_index: usize,
    pub items: Vec<AnnotationItem>,
}

impl SoundingAnnotation {
    pub fn empty(frame_index: usize) -> Self {
        Self { frame_index, items: Vec::new() }
    }

    pub fn new(frame_index: usize, items: Vec<AnnotationItem>) -> Self {
        Self { frame_index, items }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn sound_labels(&self) -> BTreeSet<&str> {
        self.items.iter().map(|i| i.sound_label.as_str()).collect()
    }

    /// Drawn boxes clipped to the frame; a box with nothing inside is an error.
    pub fn clamped_to(mut self, dims: FrameDims) -> Result<Self, ModelError> {
        for item in &mut self.items {
            if let Target::CustomBox(b) = item.target {
                item.target = Target::CustomBox(b.clamp_to(dims.width, dims.height)?);
            }
        }
        Ok(self)
    }

    /// Checks item uniqueness and that detection targets exist in `frame`.
    pub fn validate(&self, frame: &FrameRecord) -> Result<(), ModelError> {
        let mut ids = BTreeSet::new();
        let mut boxes: Vec<BoundingBox> = Vec::new();
        for item in &self.items {
            match item.target {
                Target::DetectionId(id) => {
                    if frame.detection(id).is_none() {
                        return Err(ModelError::UnknownDetection { id: id.0, frame: frame.index });
                    }
                    if !ids.insert(id) {
                        return Err(ModelError::DuplicateTarget(self.frame_index));
                    }
                }
                Target::CustomBox(b) => {
                    b.validate()?;
                    if boxes.contains(&b) {
                        return Err(ModelError::DuplicateTarget(self.frame_index));
                    }
                    boxes.push(b);
                }
            }
        }
        Ok(())
    }

    /// Resolved `(box, label, provenance)` triples; unresolvable detection ids are dropped.
    pub fn resolved<'a>(
        &'a self,
        frame: &'a FrameRecord,
    ) -> impl Iterator<Item = (BoundingBox, &'a str, Provenance)> + 'a {
        self.items.iter().filter_map(move |i| {
            i.target.resolve(frame).map(|b| (b, i.sound_label.as_str(), i.provenance))
        })
    }
}

/// Thresholds governing correspondence, change detection and equality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchPolicy {
    pub alpha: f64,
    pub beta: f64,
    /// Maximum scan-ahead when looking for the next changed frame.
    pub k: usize,
    /// Audio-tag confidence threshold.
    pub tag_threshold: f64,
    /// IoU at which a drawn box counts as the same object as another box in the same frame.
    pub same_frame_iou: f64,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        Self { alpha: 0.8, beta: 0.05, k: 10, tag_threshold: 0.5, same_frame_iou: 0.8 }
    }
}

impl MatchPolicy {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ModelError::Policy("alpha must lie in (0, 1]"));
        }
        if !(self.beta >= 0.0) {
            return Err(ModelError::Policy("beta must be non-negative"));
        }
        if self.k < 1 {
            return Err(ModelError::Policy("k must be at least 1"));
        }
        if !(self.tag_threshold > 0.0 && self.tag_threshold < 1.0) {
            return Err(ModelError::Policy("tag threshold must lie in (0, 1)"));
        }
        if !(self.same_frame_iou > 0.0 && self.same_frame_iou <= 1.0) {
            return Err(ModelError::Policy("same-frame IoU must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// The engine's view of a project: ordered frames plus the active policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub dims: FrameDims,
    pub fps: u32,
    pub policy: MatchPolicy,
    pub frames: Vec<FrameRecord>,
}

impl Project {
    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn frame(&self, index: usize) -> Option<&FrameRecord> {
        self.frames.get(index)
    }
}

fn targets_match(
    a: &AnnotationItem,
    b: &AnnotationItem,
    frame: &FrameRecord,
    policy: &MatchPolicy,
) -> bool {
    if a.sound_label != b.sound_label {
        return false;
    }
    match (a.target, b.target) {
        (Target::DetectionId(x), Target::DetectionId(y)) => x == y,
        (ta, tb) => match (ta.resolve(frame), tb.resolve(frame)) {
            (Some(ba), Some(bb)) => ba.iou(&bb) >= policy.same_frame_iou,
            _ => false,
        },
    }
}

/// Set equality of two annotations of the same frame.
///
/// Items pair up when their sound labels agree and their targets match:
/// identical detection ids, or (when at least one side is a drawn box) an
/// IoU of at least `policy.same_frame_iou`. Provenance is ignored.
pub fn annotation_equal(
    a: &SoundingAnnotation,
    b: &SoundingAnnotation,
    frame: &FrameRecord,
    policy: &MatchPolicy,
) -> bool {
    if a.items.len() != b.items.len() {
        return false;
    }
    let n = a.items.len();
    let compatible: Vec<Vec<bool>> = a
        .items
        .iter()
        .map(|x| b.items.iter().map(|y| targets_match(x, y, frame, policy)).collect())
        .collect();
    // Bipartite matching by augmenting paths; annotations hold a handful of items.
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &compatible, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}

fn augment(
    i: usize,
    compatible: &[Vec<bool>],
    seen: &mut [bool],
    owner: &mut [Option<usize>],
) -> bool {
    for j in 0..compatible[i].len() {
        if compatible[i][j] && !seen[j] {
            seen[j] = true;
            if owner[j].map_or(true, |o| augment(o, compatible, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
    }
    false
}

/// `[x, y, w, h]` array encoding used by the detector sidecar.
pub mod box_array {
    use super::BoundingBox;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(b: &BoundingBox, s: S) -> Result<S::Ok, S::Error> {
        [b.x, b.y, b.w, b.h].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BoundingBox, D::Error> {
        let [x, y, w, h] = <[f64; 4]>::deserialize(d)?;
        Ok(BoundingBox { x, y, w, h })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(x, y, w, h).unwrap()
    }

    #[test]
    fn drawn_boxes_are_clipped_to_the_frame() {
        let dims = FrameDims { width: 64, height: 48 };
        let a = SoundingAnnotation::new(
            0,
            vec![
                AnnotationItem::human(Target::CustomBox(bb(-4.0, 40.0, 10.0, 20.0)), "x"),
                AnnotationItem::human(Target::DetectionId(DetectionId(3)), "y"),
            ],
        );
        let c = a.clamped_to(dims).unwrap();
        assert_eq!(c.items[0].target, Target::CustomBox(bb(0.0, 40.0, 6.0, 8.0)));
        assert_eq!(c.items[1].target, Target::DetectionId(DetectionId(3)));
        let off = SoundingAnnotation::new(0, vec![AnnotationItem::human(Target::CustomBox(bb(70.0, 0.0, 5.0, 5.0)), "x")]);
        assert!(matches!(off.clamped_to(dims), Err(ModelError::OutsideFrame { .. })));
    }

    fn frame_with(boxes: &[(u32, BoundingBox)]) -> FrameRecord {
        FrameRecord {
            index: 0,
            timestamp_ms: 0,
            image_ref: "frames/000000.png".into(),
            detections: boxes
                .iter()
                .map(|(id, b)| DetectedObject {
                    id: DetectionId(*id),
                    bbox: *b,
                    class_label: "person".into(),
                    confidence: 0.9,
                })
                .collect(),
            audio_tags: vec![],
        }
    }

    fn det(id: u32, label: &str) -> AnnotationItem {
        AnnotationItem::human(Target::DetectionId(DetectionId(id)), label)
    }

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(BoundingBox::new(0.0, 0.0, 0.0, 5.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 5.0, -1.0).is_err());
        assert!(BoundingBox::new(f64::NAN, 0.0, 5.0, 5.0).is_err());
    }

    #[test]
    fn clamp_clips_to_frame() {
        let b = bb(-5.0, 10.0, 20.0, 100.0).clamp_to(64, 64).unwrap();
        assert_eq!(b, bb(0.0, 10.0, 15.0, 54.0));
        assert!(bb(70.0, 0.0, 5.0, 5.0).clamp_to(64, 64).is_err());
    }

    #[test]
    fn timestamps_at_eight_fps() {
        assert_eq!(frame_timestamp_ms(0, 8), 0);
        assert_eq!(frame_timestamp_ms(3, 8), 375);
        assert_eq!(frame_timestamp_ms(1, 3), 333);
    }

    #[test]
    fn empty_annotations_are_equal() {
        let f = frame_with(&[]);
        let p = MatchPolicy::default();
        assert!(annotation_equal(&SoundingAnnotation::empty(0), &SoundingAnnotation::empty(0), &f, &p));
    }

    #[test]
    fn identical_detection_items_are_equal() {
        let f = frame_with(&[(3, bb(0.0, 0.0, 10.0, 10.0))]);
        let p = MatchPolicy::default();
        let a = SoundingAnnotation::new(0, vec![det(3, "violin")]);
        assert!(annotation_equal(&a, &a.clone(), &f, &p));
    }

    #[test]
    fn custom_box_matches_detection_with_same_geometry() {
        let f = frame_with(&[(3, bb(0.0, 0.0, 10.0, 10.0))]);
        let p = MatchPolicy::default();
        let a = SoundingAnnotation::new(0, vec![det(3, "violin")]);
        let b = SoundingAnnotation::new(
            0,
            vec![AnnotationItem::human(Target::CustomBox(bb(0.0, 0.0, 10.0, 10.0)), "violin")],
        );
        assert!(annotation_equal(&a, &b, &f, &p));
        // IoU 70/100 stays below the 0.8 same-frame threshold.
        let c = SoundingAnnotation::new(
            0,
            vec![AnnotationItem::human(Target::CustomBox(bb(0.0, 0.0, 10.0, 7.0)), "violin")],
        );
        assert!(!annotation_equal(&a, &c, &f, &p));
    }

    #[test]
    fn labels_and_cardinality_matter() {
        let f = frame_with(&[(1, bb(0.0, 0.0, 10.0, 10.0)), (2, bb(20.0, 0.0, 10.0, 10.0))]);
        let p = MatchPolicy::default();
        let a = SoundingAnnotation::new(0, vec![det(1, "dog")]);
        let b = SoundingAnnotation::new(0, vec![det(1, "cat")]);
        let c = SoundingAnnotation::new(0, vec![det(1, "dog"), det(2, "dog")]);
        assert!(!annotation_equal(&a, &b, &f, &p));
        assert!(!annotation_equal(&a, &c, &f, &p));
    }

    #[test]
    fn equality_needs_a_bijection() {
        // Both drawn boxes overlap det 1 strongly, but only one may pair with it.
        let f = frame_with(&[(1, bb(0.0, 0.0, 10.0, 10.0)), (2, bb(40.0, 0.0, 10.0, 10.0))]);
        let p = MatchPolicy::default();
        let a = SoundingAnnotation::new(0, vec![det(1, "dog"), det(2, "dog")]);
        let b = SoundingAnnotation::new(
            0,
            vec![
                AnnotationItem::human(Target::CustomBox(bb(0.0, 0.0, 10.0, 10.0)), "dog"),
                AnnotationItem::human(Target::CustomBox(bb(0.5, 0.0, 10.0, 10.0)), "dog"),
            ],
        );
        assert!(!annotation_equal(&a, &b, &f, &p));
    }

    #[test]
    fn validate_rejects_duplicate_and_unknown_targets() {
        let f = frame_with(&[(1, bb(0.0, 0.0, 10.0, 10.0))]);
        let dup = SoundingAnnotation::new(0, vec![det(1, "dog"), det(1, "bark")]);
        assert_eq!(dup.validate(&f), Err(ModelError::DuplicateTarget(0)));
        let unknown = SoundingAnnotation::new(0, vec![det(9, "dog")]);
        assert!(matches!(unknown.validate(&f), Err(ModelError::UnknownDetection { id: 9, .. })));
    }

    #[test]
    fn policy_defaults_are_valid() {
        let p = MatchPolicy::default();
        assert_eq!((p.alpha, p.beta, p.k), (0.8, 0.05, 10));
        p.validate().unwrap();
        assert!(MatchPolicy { k: 0, ..p }.validate().is_err());
        assert!(MatchPolicy { tag_threshold: 1.0, ..p }.validate().is_err());
    }

    #[test]
    fn item_serialization_shape() {
        let item = det(3, "violin");
        let json = serde_json::to_string(&item).unwrap();
        assert_eq!(json, r#"{"target":{"detection_id":3},"sound_label":"violin","provenance":"human"}"#);
        let obj = DetectedObject {
            id: DetectionId(0),
            bbox: bb(1.0, 2.0, 3.0, 4.0),
            class_label: "dog".into(),
            confidence: 0.97,
        };
        assert_eq!(
            serde_json::to_string(&obj).unwrap(),
            r#"{"id":0,"box":[1.0,2.0,3.0,4.0],"label":"dog","confidence":0.97}"#
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_box() -> impl Strategy<Value = BoundingBox> {
            (0.0..50.0f64, 0.0..50.0f64, 1.0..30.0f64, 1.0..30.0f64)
                .prop_map(|(x, y, w, h)| BoundingBox { x, y, w, h })
        }

        fn arb_item() -> impl Strategy<Value = AnnotationItem> {
            let target = prop_oneof![
                (0u32..4).prop_map(|i| Target::DetectionId(DetectionId(i))),
                arb_box().prop_map(Target::CustomBox),
            ];
            let prov = prop_oneof![
                Just(Provenance::Human),
                Just(Provenance::Auto),
                Just(Provenance::AutoModified)
            ];
            (target, prop::sample::select(vec!["dog", "bark", "violin"]), prov).prop_map(
                |(target, label, provenance)| AnnotationItem {
                    target,
                    sound_label: label.into(),
                    provenance,
                },
            )
        }

        fn frame() -> FrameRecord {
            frame_with(&[
                (0, BoundingBox { x: 0.0, y: 0.0, w: 10.0, h: 10.0 }),
                (1, BoundingBox { x: 5.0, y: 5.0, w: 10.0, h: 10.0 }),
                (2, BoundingBox { x: 30.0, y: 30.0, w: 20.0, h: 10.0 }),
                (3, BoundingBox { x: 31.0, y: 30.0, w: 20.0, h: 10.0 }),
            ])
        }

        proptest! {
            #[test]
            fn equality_is_reflexive_symmetric_and_order_free(
                xs in prop::collection::vec(arb_item(), 0..4),
                ys in prop::collection::vec(arb_item(), 0..4),
            ) {
                let f = frame();
                let p = MatchPolicy::default();
                let a = SoundingAnnotation::new(0, xs.clone());
                let b = SoundingAnnotation::new(0, ys);
                prop_assert!(annotation_equal(&a, &a, &f, &p));
                prop_assert_eq!(annotation_equal(&a, &b, &f, &p), annotation_equal(&b, &a, &f, &p));
                let mut rev = xs;
                rev.reverse();
                let r = SoundingAnnotation::new(0, rev);
                prop_assert!(annotation_equal(&a, &r, &f, &p));
                prop_assert_eq!(annotation_equal(&r, &b, &f, &p), annotation_equal(&a, &b, &f, &p));
            }

            #[test]
            fn items_round_trip_through_json(item in arb_item()) {
                let json = serde_json::to_string(&item).unwrap();
                let back: AnnotationItem = serde_json::from_str(&json).unwrap();
                prop_assert_eq!(back, item);
            }
        }
    }
}
