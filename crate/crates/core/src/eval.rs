//! Consensus IoU and session statistics.
//!
//! Boxes are snapped to whole pixels before scoring: a pixel belongs to a
//! box iff its centre lies in the half-open box `[x, x+w) x [y, y+h)`.
//! Scores are computed over the rectangles' coordinate grid rather than by
//! visiting pixels, so cost depends on the number of boxes, not frame size.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BoundingBox, FrameDims, Project};
use crate::scheduler::{FrameStatus, SessionState};
use crate::store::{export, ExportFrame};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("consensus map needs at least one expert")]
    NoExperts,
    #[error("consensus parameter must be at least 1")]
    BadConsensus,
}

/// Half-open pixel rectangle `[x0, x1) x [y0, y1)` after snapping and clipping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl PixelRect {
    pub fn snap(b: &BoundingBox, dims: FrameDims) -> Option<PixelRect> {
        let lo = |v: f64| (v - 0.5).ceil() as i64;
        let (w, h) = (i64::from(dims.width), i64::from(dims.height));
        let r = PixelRect {
            x0: lo(b.x).clamp(0, w),
            y0: lo(b.y).clamp(0, h),
            x1: lo(b.right()).clamp(0, w),
            y1: lo(b.bottom()).clamp(0, h),
        };
        (r.x1 > r.x0 && r.y1 > r.y0).then_some(r)
    }

    fn contains_cell(&self, x0: i64, x1: i64, y0: i64, y1: i64) -> bool {
        self.x0 <= x0 && x1 <= self.x1 && self.y0 <= y0 && y1 <= self.y1
    }

    fn contains_pixel(&self, px: i64, py: i64) -> bool {
        self.x0 <= px && px < self.x1 && self.y0 <= py && py < self.y1
    }
}

/// Pixel weights `g = min(sum of expert maps / consensus, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusMap {
    pub dims: FrameDims,
    pub consensus_param: u32,
    /// Snapped boxes of each expert; an expert's binary map is the union of its boxes.
    pub experts: Vec<Vec<PixelRect>>,
}

impl ConsensusMap {
    /// Weight of pixel `(px, py)`.
    pub fn weight_at(&self, px: i64, py: i64) -> f64 {
        let votes = self.experts.iter().filter(|e| e.iter().any(|r| r.contains_pixel(px, py))).count();
        (votes as f64 / f64::from(self.consensus_param)).min(1.0)
    }

    fn votes_in_cell(&self, x0: i64, x1: i64, y0: i64, y1: i64) -> usize {
        self.experts
            .iter()
            .filter(|e| e.iter().any(|r| r.contains_cell(x0, x1, y0, y1)))
            .count()
    }
}

/// Build the consensus map of several experts' boxes for one frame.
pub fn consensus_map(
    experts: &[Vec<BoundingBox>],
    dims: FrameDims,
    consensus_param: u32,
) -> Result<ConsensusMap, EvalError> {
    if experts.is_empty() {
        return Err(EvalError::NoExperts);
    }
    if consensus_param == 0 {
        return Err(EvalError::BadConsensus);
    }
    Ok(ConsensusMap {
        dims,
        consensus_param,
        experts: experts
            .iter()
            .map(|boxes| boxes.iter().filter_map(|b| PixelRect::snap(b, dims)).collect())
            .collect(),
    })
}

/// Consensus IoU of a participant's boxes against `map`:
/// `sum_{i in A} g_i / (sum_i g_i + |A - G|)` with `G = {g > 0}`.
///
/// With no expert mass the score is 1 for an empty participant and 0 otherwise.
pub fn ciou(participant: &[BoundingBox], map: &ConsensusMap) -> f64 {
    let part: Vec<PixelRect> = participant.iter().filter_map(|b| PixelRect::snap(b, map.dims)).collect();

    let mut xs = vec![0, i64::from(map.dims.width)];
    let mut ys = vec![0, i64::from(map.dims.height)];
    for r in map.experts.iter().flatten().chain(part.iter()) {
        xs.extend([r.x0, r.x1]);
        ys.extend([r.y0, r.y1]);
    }
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();

    let (mut total_g, mut hit_g, mut outside) = (0.0f64, 0.0f64, 0i64);
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let (x0, x1, y0, y1) = (xw[0], xw[1], yw[0], yw[1]);
            let area = (x1 - x0) * (y1 - y0);
            let votes = map.votes_in_cell(x0, x1, y0, y1);
            let g = (votes as f64 / f64::from(map.consensus_param)).min(1.0);
            let in_a = part.iter().any(|r| r.contains_cell(x0, x1, y0, y1));
            total_g += g * area as f64;
            if in_a {
                hit_g += g * area as f64;
                if votes == 0 {
                    outside += area;
                }
            }
        }
    }
    if total_g == 0.0 {
        return if part.is_empty() { 1.0 } else { 0.0 };
    }
    hit_g / (total_g + outside as f64)
}

/// Expert annotations used as ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub experts: Vec<Vec<ExportFrame>>,
    pub consensus_param: u32,
}

impl GroundTruth {
    pub fn single(truth: Vec<ExportFrame>) -> Self {
        Self { experts: vec![truth], consensus_param: 1 }
    }

    fn boxes(&self, expert: usize, frame: usize) -> Vec<BoundingBox> {
        self.experts[expert]
            .iter()
            .find(|f| f.frame_index == frame)
            .map(|f| f.boxes())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub n_frames: usize,
    /// Frames the human submitted.
    pub keyframe_count: usize,
    pub manual_count: usize,
    pub auto_count: usize,
    pub auto_modified_count: usize,
    pub skipped_count: usize,
    pub unannotated_count: usize,
    pub manual_fraction: f64,
    pub auto_fraction: f64,
    pub auto_modified_fraction: f64,
    pub skipped_fraction: f64,
    pub per_frame_ciou: Vec<f64>,
    pub mean_ciou: Option<f64>,
}

impl SessionStats {
    /// Automatically produced frames, edited or not, as a fraction of all frames.
    pub fn automation_fraction(&self) -> f64 {
        self.auto_fraction + self.auto_modified_fraction
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let pct = |f: f64| format!("{:5.1}%", 100.0 * f);
        let _ = writeln!(s, "{:<16} {:>7} {:>7}", "status", "frames", "share");
        let _ = writeln!(s, "{:<16} {:>7} {:>7}", "manual", self.manual_count, pct(self.manual_fraction));
        let _ = writeln!(s, "{:<16} {:>7} {:>7}", "auto", self.auto_count, pct(self.auto_fraction));
        let _ = writeln!(
            s,
            "{:<16} {:>7} {:>7}",
            "auto_modified",
            self.auto_modified_count,
            pct(self.auto_modified_fraction)
        );
        let _ = writeln!(s, "{:<16} {:>7} {:>7}", "skipped", self.skipped_count, pct(self.skipped_fraction));
        let _ = writeln!(s, "{:<16} {:>7}", "unannotated", self.unannotated_count);
        let _ = writeln!(s, "{:<16} {:>7}", "keyframes", self.keyframe_count);
        let _ = writeln!(s, "{:<16} {:>7}", "total", self.n_frames);
        if let Some(m) = self.mean_ciou {
            let _ = writeln!(s, "{:<16} {:>7.4}", "mean cIoU", m);
        }
        s
    }
}

/// Counts by status plus, when `truth` is given, per-frame cIoU of the session export.
pub fn session_stats(project: &Project, state: &SessionState, truth: Option<&GroundTruth>) -> SessionStats {
    let count = |s: FrameStatus| state.status.iter().filter(|x| **x == s).count();
    let n = state.n_frames;
    let frac = |c: usize| if n == 0 { 0.0 } else { c as f64 / n as f64 };
    let (manual, auto, modified, skipped) = (
        count(FrameStatus::Human),
        count(FrameStatus::Auto),
        count(FrameStatus::AutoModified),
        count(FrameStatus::SkippedAudioGate),
    );
    let per_frame_ciou: Vec<f64> = match truth {
        Some(gt) => {
            let exported = export(project, state);
            exported
                .iter()
                .map(|f| {
                    let experts: Vec<Vec<BoundingBox>> =
                        (0..gt.experts.len()).map(|e| gt.boxes(e, f.frame_index)).collect();
                    let map = consensus_map(&experts, project.dims, gt.consensus_param.max(1))
                        .expect("ground truth has experts");
                    ciou(&f.boxes(), &map)
                })
                .collect()
        }
        None => Vec::new(),
    };
    let mean_ciou = (!per_frame_ciou.is_empty())
        .then(|| per_frame_ciou.iter().sum::<f64>() / per_frame_ciou.len() as f64);
    SessionStats {
        n_frames: n,
        keyframe_count: state.keyframes.len(),
        manual_count: manual,
        auto_count: auto,
        auto_modified_count: modified,
        skipped_count: skipped,
        unannotated_count: count(FrameStatus::Unannotated),
        manual_fraction: frac(manual),
        auto_fraction: frac(auto),
        auto_modified_fraction: frac(modified),
        skipped_fraction: frac(skipped),
        per_frame_ciou,
        mean_ciou,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIMS: FrameDims = FrameDims { width: 64, height: 64 };

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox { x, y, w, h }
    }

    #[test]
    fn single_expert_map_is_binary() {
        let m = consensus_map(&[vec![bb(0.0, 0.0, 10.0, 10.0)]], DIMS, 1).unwrap();
        assert_eq!(m.weight_at(0, 0), 1.0);
        assert_eq!(m.weight_at(9, 9), 1.0);
        assert_eq!(m.weight_at(10, 9), 0.0);
    }

    #[test]
    fn duplicate_experts_clamp_at_one() {
        let one = consensus_map(&[vec![bb(0.0, 0.0, 10.0, 10.0)]], DIMS, 1).unwrap();
        let two = consensus_map(&[vec![bb(0.0, 0.0, 10.0, 10.0)], vec![bb(0.0, 0.0, 10.0, 10.0)]], DIMS, 1).unwrap();
        for (x, y) in [(0, 0), (5, 5), (20, 20)] {
            assert_eq!(one.weight_at(x, y), two.weight_at(x, y));
        }
    }

    #[test]
    fn two_experts_cover_their_union() {
        let m = consensus_map(&[vec![bb(0.0, 0.0, 10.0, 10.0)], vec![bb(5.0, 5.0, 15.0, 15.0)]], DIMS, 1).unwrap();
        assert_eq!(m.weight_at(1, 1), 1.0);
        assert_eq!(m.weight_at(19, 19), 1.0);
        assert_eq!(m.weight_at(12, 2), 0.0);
        let strict = consensus_map(&[vec![bb(0.0, 0.0, 10.0, 10.0)], vec![bb(5.0, 5.0, 15.0, 15.0)]], DIMS, 2).unwrap();
        assert_eq!(strict.weight_at(1, 1), 0.5);
        assert_eq!(strict.weight_at(7, 7), 1.0);
    }

    #[test]
    fn ciou_examples() {
        let m = consensus_map(&[vec![bb(0.0, 0.0, 10.0, 10.0)]], DIMS, 1).unwrap();
        assert_eq!(ciou(&[bb(0.0, 0.0, 10.0, 10.0)], &m), 1.0);
        assert_eq!(ciou(&[bb(30.0, 30.0, 10.0, 10.0)], &m), 0.0);
        // 100 / (100 + 100) with a spurious disjoint box.
        assert_eq!(ciou(&[bb(0.0, 0.0, 10.0, 10.0), bb(50.0, 50.0, 10.0, 10.0)], &m), 0.5);
    }

    #[test]
    fn empty_truth_cases() {
        let m = consensus_map(&[vec![]], DIMS, 1).unwrap();
        assert_eq!(ciou(&[], &m), 1.0);
        assert_eq!(ciou(&[bb(0.0, 0.0, 4.0, 4.0)], &m), 0.0);
        let m = consensus_map(&[vec![bb(0.0, 0.0, 10.0, 10.0)]], DIMS, 1).unwrap();
        assert_eq!(ciou(&[], &m), 0.0);
    }

    #[test]
    fn snapping_uses_pixel_centres() {
        // [0.4, 1.6) covers centres 0.5 and 1.5 only.
        let r = PixelRect::snap(&bb(0.4, 0.0, 1.2, 1.0), DIMS).unwrap();
        assert_eq!((r.x0, r.x1), (0, 2));
        // [0.6, 1.4) covers no centre.
        assert!(PixelRect::snap(&bb(0.6, 0.0, 0.8, 1.0), DIMS).is_none());
        // Clipped at the frame edge.
        let r = PixelRect::snap(&bb(60.0, 60.0, 10.0, 10.0), DIMS).unwrap();
        assert_eq!((r.x1, r.y1), (64, 64));
    }

    #[test]
    fn argument_errors() {
        assert_eq!(consensus_map(&[], DIMS, 1), Err(EvalError::NoExperts));
        assert_eq!(consensus_map(&[vec![]], DIMS, 0), Err(EvalError::BadConsensus));
    }
}
