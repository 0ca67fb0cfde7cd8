//! Rectangle geometry, the drift-tolerant correspondence test, and
//! prediction of a prior annotation onto a later frame's detections.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AnnotationItem, BoundingBox, DetectionId, FrameRecord, MatchPolicy, Provenance,
    SoundingAnnotation, Target,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("target frame {target} does not follow source frame {src}")]
    NotForward { src: usize, target: usize },
}

/// Area of the intersection of two boxes, in px².
pub fn overlap_area(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let dx = a.right().min(b.right()) - a.x.max(b.x);
    let dy = a.bottom().min(b.bottom()) - a.y.max(b.y);
    dx.max(0.0) * dy.max(0.0)
}

/// Fixed-point scale for alpha and beta in the threshold bracket.
const BRACKET_SCALE: f64 = 1e9;

/// Overlap a later box must exceed to count as the same object as `a`
/// after `distance` frames: `(alpha - distance * beta) * area(a)`.
///
/// Alpha and beta are taken to nine decimals and the bracket is formed in
/// integers, so `0.8 - 4 * 0.05` is exactly `0.6` rather than `0.6000000000000001`.
pub fn correspondence_threshold(a: &BoundingBox, distance: usize, policy: &MatchPolicy) -> f64 {
    let alpha = (policy.alpha * BRACKET_SCALE).round() as i64;
    let beta = (policy.beta * BRACKET_SCALE).round() as i64;
    let bracket = alpha.saturating_sub((distance as i64).saturating_mul(beta));
    bracket as f64 * a.area() / BRACKET_SCALE
}

/// Whether `b` in frame `index_target` continues `a` from frame `index_src`.
///
/// Once the threshold bracket drops to zero or below, any positive overlap
/// counts as a correspondence.
pub fn condition1_holds(
    a: &BoundingBox,
    b: &BoundingBox,
    index_src: usize,
    index_target: usize,
    policy: &MatchPolicy,
) -> Result<bool, MatchError> {
    if index_target <= index_src {
        return Err(MatchError::NotForward { src: index_src, target: index_target });
    }
    let overlap = overlap_area(b, a);
    let threshold = correspondence_threshold(a, index_target - index_src, policy);
    if threshold <= 0.0 {
        Ok(overlap > 0.0)
    } else {
        Ok(overlap > threshold)
    }
}

/// Candidate ranking score, lower is better: center distance plus width and height deltas.
pub fn match_score(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by) + (a.w - b.w).abs() + (a.h - b.h).abs()
}

/// Where one source item landed in the target frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub src_item: AnnotationItem,
    pub target: CorrespondenceTarget,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrespondenceTarget {
    Matched(DetectionId),
    /// No detection satisfied the correspondence test; the source geometry is copied.
    Carried(BoundingBox),
}

/// Per-item correspondences from `src` (annotating `src_frame`) onto `target_frame`.
///
/// Each detection is claimed by at most one source item, in source order.
pub fn correspond(
    src: &SoundingAnnotation,
    src_frame: &FrameRecord,
    target_frame: &FrameRecord,
    policy: &MatchPolicy,
) -> Result<Vec<Correspondence>, MatchError> {
    let (s, t) = (src_frame.index, target_frame.index);
    if t <= s {
        return Err(MatchError::NotForward { src: s, target: t });
    }
    let mut claimed: Vec<DetectionId> = Vec::new();
    let mut out = Vec::with_capacity(src.items.len());
    for item in &src.items {
        let Some(src_box) = item.target.resolve(src_frame) else {
            continue;
        };
        let mut ranked: Vec<(f64, DetectionId, &BoundingBox)> = target_frame
            .detections
            .iter()
            .filter(|d| !claimed.contains(&d.id))
            .map(|d| (match_score(&src_box, &d.bbox), d.id, &d.bbox))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let hit = ranked
            .into_iter()
            .find(|(_, _, b)| condition1_holds(&src_box, b, s, t, policy).unwrap_or(false));
        let (target, score) = match hit {
            Some((score, id, _)) => {
                claimed.push(id);
                (CorrespondenceTarget::Matched(id), score)
            }
            None => (CorrespondenceTarget::Carried(src_box), 0.0),
        };
        out.push(Correspondence { src_item: item.clone(), target, score });
    }
    Ok(out)
}

/// Predict `target_frame`'s annotation by inheriting each source item's sound label.
///
/// All predicted items carry provenance `auto`.
pub fn predict_annotation(
    src: &SoundingAnnotation,
    src_frame: &FrameRecord,
    target_frame: &FrameRecord,
    policy: &MatchPolicy,
) -> Result<SoundingAnnotation, MatchError> {
    let items = correspond(src, src_frame, target_frame, policy)?
        .into_iter()
        .map(|c| AnnotationItem {
            target: match c.target {
                CorrespondenceTarget::Matched(id) => Target::DetectionId(id),
                CorrespondenceTarget::Carried(b) => Target::CustomBox(b),
            },
            sound_label: c.src_item.sound_label,
            provenance: Provenance::Auto,
        })
        .collect();
    Ok(SoundingAnnotation::new(target_frame.index, items))
}
