//! Keyframe scheduling: the audio-visual-sensitive binary search and the
//! farthest-frame scan that pick the next frame a human has to annotate.
//!
//! The flow per human submission at frame `f` with left bound `l` (the
//! nearest earlier keyframe):
//!
//! * the prediction from `l` agrees with `f`: interpolate `(l, f)`, then
//!   unwind the right-bound stack, interpolating every agreeing pair; the
//!   first disagreeing pair `(cur, right)` yields its midpoint and `right`
//!   stays on the stack. An empty stack falls through to the scan.
//! * it disagrees: push `f` and ask for the midpoint of `(l, f)`. If no
//!   unannotated frame is left between them, the boundary is found and the
//!   stack unwinds from `f`.
//!
//! The scan looks up to `k` frames past the farthest keyframe for the first
//! audio-visual change and asks for it, or for the `k`-th frame when none
//! changes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::change::audio_visual_change;
use crate::matching::{predict_annotation, MatchError};
use crate::model::{
    annotation_equal, AnnotationItem, ModelError, Project, Provenance, SoundingAnnotation,
};
use crate::propagation::{populate, PropagationError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedulerError {
    #[error("frame {frame} is out of range (video has {n_frames} frames)")]
    OutOfRange { frame: usize, n_frames: usize },
    #[error("annotation is for frame {got}, submitted for frame {expected}")]
    FrameMismatch { expected: usize, got: usize },
    #[error("invalid annotation: {0}")]
    Invalid(#[from] ModelError),
    #[error("no frame has been annotated yet")]
    NothingAnnotated,
    #[error("end of video")]
    EndOfVideo,
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameStatus {
    Unannotated,
    Human,
    Auto,
    AutoModified,
    SkippedAudioGate,
}

impl FrameStatus {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, FrameStatus::Unannotated)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FrameStatus::Unannotated => "unannotated",
            FrameStatus::Human => "human",
            FrameStatus::Auto => "auto",
            FrameStatus::AutoModified => "auto_modified",
            FrameStatus::SkippedAudioGate => "skipped_audio_gate",
        }
    }
}

/// Guided sessions run the keyframe search; manual sessions walk frame by frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionMode {
    #[default]
    Guided,
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "frame", rename_all = "snake_case")]
pub enum NextStep {
    AnnotateFrame(usize),
    Done,
}

impl NextStep {
    pub fn frame(&self) -> Option<usize> {
        match self {
            NextStep::AnnotateFrame(f) => Some(*f),
            NextStep::Done => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerDecision {
    #[serde(flatten)]
    pub next: NextStep,
    /// Exclusive `(from, to)` ranges interpolated during this step.
    pub populated: Vec<(usize, usize)>,
    /// Frames the audio gate refused during this step.
    pub skipped: Vec<usize>,
}

/// Everything the scheduler knows about one annotation session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub n_frames: usize,
    pub mode: SessionMode,
    /// Nearest keyframe preceding `current`.
    pub left_bound: Option<usize>,
    /// Frame most recently submitted by the human.
    pub current: Option<usize>,
    /// Keyframes right of the search window whose continuity is unconfirmed; top is last.
    pub right_bound_stack: Vec<usize>,
    /// Highest keyframe.
    pub farthest_human: Option<usize>,
    pub status: Vec<FrameStatus>,
    pub annotations: Vec<Option<SoundingAnnotation>>,
    /// Frames the human has submitted.
    pub keyframes: BTreeSet<usize>,
    /// Frame the last decision asked for.
    pub pending: Option<usize>,
    /// Outstanding preempted prediction awaiting confirmation.
    pub proposal: Option<SoundingAnnotation>,
}

impl SessionState {
    /// A fresh guided session; the first request is frame 0.
    pub fn new(n_frames: usize) -> Self {
        Self::with_mode(n_frames, SessionMode::Guided)
    }

    pub fn with_mode(n_frames: usize, mode: SessionMode) -> Self {
        Self {
            n_frames,
            mode,
            left_bound: None,
            current: None,
            right_bound_stack: Vec::new(),
            farthest_human: None,
            status: vec![FrameStatus::Unannotated; n_frames],
            annotations: vec![None; n_frames],
            keyframes: BTreeSet::new(),
            pending: (n_frames > 0).then_some(0),
            proposal: None,
        }
    }

    pub fn initial_step(&self) -> NextStep {
        match self.pending {
            Some(f) => NextStep::AnnotateFrame(f),
            None => NextStep::Done,
        }
    }

    pub fn is_keyframe(&self, frame: usize) -> bool {
        self.keyframes.contains(&frame)
    }

    pub fn keyframe_annotation(&self, frame: usize) -> Option<&SoundingAnnotation> {
        if self.is_keyframe(frame) {
            self.annotations[frame].as_ref()
        } else {
            None
        }
    }

    pub fn is_complete(&self) -> bool {
        self.status.iter().all(FrameStatus::is_terminal)
    }

    fn prev_keyframe(&self, frame: usize) -> Option<usize> {
        self.keyframes.range(..frame).next_back().copied()
    }

    fn has_open_frames(&self, left: usize, right: usize) -> bool {
        (left + 1..right).any(|i| self.status[i] == FrameStatus::Unannotated)
    }

    /// Midpoint of `(left, right)`, moved to the nearest unannotated frame if needed.
    fn pick_midpoint(&self, left: usize, right: usize) -> Option<usize> {
        let mid = (left + right) / 2;
        (left + 1..right)
            .filter(|&i| self.status[i] == FrameStatus::Unannotated)
            .min_by_key(|&i| (i.abs_diff(mid), i))
    }

    fn prediction_matches(&self, project: &Project, from: usize, to: usize) -> Result<bool, SchedulerError> {
        let (Some(src), Some(dst)) = (self.keyframe_annotation(from), self.keyframe_annotation(to)) else {
            return Ok(false);
        };
        let pred = predict_annotation(src, &project.frames[from], &project.frames[to], &project.policy)?;
        Ok(annotation_equal(&pred, dst, &project.frames[to], &project.policy))
    }

    /// Store a human submission, deriving frame status and item provenance.
    fn record(&mut self, frame: usize, annotation: SoundingAnnotation) {
        let prior: Option<&SoundingAnnotation> = match self.status[frame] {
            FrameStatus::Auto | FrameStatus::AutoModified => self.annotations[frame].as_ref(),
            _ => self.proposal.as_ref().filter(|p| p.frame_index == frame),
        };
        let (status, items) = match prior {
            None => (
                FrameStatus::Human,
                annotation
                    .items
                    .into_iter()
                    .map(|i| AnnotationItem { provenance: Provenance::Human, ..i })
                    .collect::<Vec<_>>(),
            ),
            Some(prior) => {
                let was_modified = self.status[frame] == FrameStatus::AutoModified;
                let unchanged = !was_modified && same_items(&prior.items, &annotation.items);
                let items = annotation
                    .items
                    .into_iter()
                    .map(|i| {
                        let kept = prior
                            .items
                            .iter()
                            .find(|p| p.target == i.target && p.sound_label == i.sound_label);
                        let provenance = match kept {
                            Some(p) if unchanged || p.provenance == Provenance::Auto => p.provenance,
                            _ => Provenance::AutoModified,
                        };
                        AnnotationItem { provenance, ..i }
                    })
                    .collect::<Vec<_>>();
                let status = if unchanged { FrameStatus::Auto } else { FrameStatus::AutoModified };
                (status, items)
            }
        };
        self.status[frame] = status;
        self.annotations[frame] = Some(SoundingAnnotation::new(frame, items));
        self.keyframes.insert(frame);
        self.farthest_human = self.keyframes.iter().next_back().copied();
        self.current = Some(frame);
        self.left_bound = self.prev_keyframe(frame);
    }

    /// Record a human annotation of `frame` and decide what comes next.
    pub fn on_human_annotation(
        &mut self,
        project: &Project,
        frame: usize,
        annotation: SoundingAnnotation,
    ) -> Result<SchedulerDecision, SchedulerError> {
        if frame >= self.n_frames {
            return Err(SchedulerError::OutOfRange { frame, n_frames: self.n_frames });
        }
        if annotation.frame_index != frame {
            return Err(SchedulerError::FrameMismatch { expected: frame, got: annotation.frame_index });
        }
        let annotation = annotation.clamped_to(project.dims)?;
        annotation.validate(&project.frames[frame])?;

        let in_order = self.pending == Some(frame) && !self.is_keyframe(frame);
        self.record(frame, annotation);
        self.proposal = None;

        let mut decision = SchedulerDecision { next: NextStep::Done, populated: vec![], skipped: vec![] };
        decision.next = match self.mode {
            SessionMode::Manual => self.next_sequential(frame),
            SessionMode::Guided if in_order => self.search_step(project, frame, &mut decision)?,
            SessionMode::Guided => self.rebuild(project, &mut decision)?,
        };
        self.pending = decision.next.frame();
        Ok(decision)
    }

    fn next_sequential(&self, frame: usize) -> NextStep {
        (frame + 1..self.n_frames)
            .chain(0..frame)
            .find(|&i| self.status[i] == FrameStatus::Unannotated)
            .map_or(NextStep::Done, NextStep::AnnotateFrame)
    }

    fn search_step(
        &mut self,
        project: &Project,
        frame: usize,
        decision: &mut SchedulerDecision,
    ) -> Result<NextStep, SchedulerError> {
        let Some(left) = self.left_bound else {
            if frame == 0 {
                return self.unwind(project, frame, decision);
            }
            return self.rebuild(project, decision);
        };
        if self.prediction_matches(project, left, frame)? {
            self.fill(project, left, frame, decision)?;
            return self.unwind(project, frame, decision);
        }
        match self.pick_midpoint(left, frame) {
            Some(mid) => {
                self.right_bound_stack.push(frame);
                Ok(NextStep::AnnotateFrame(mid))
            }
            // Adjacent disagreeing keyframes: the discontinuity is located.
            None => self.unwind(project, frame, decision),
        }
    }

    fn fill(
        &mut self,
        project: &Project,
        left: usize,
        right: usize,
        decision: &mut SchedulerDecision,
    ) -> Result<(), SchedulerError> {
        if !self.has_open_frames(left, right) {
            return Ok(());
        }
        let out = populate(self, project, left, right)?;
        decision.populated.push((left, right));
        decision.skipped.extend(out.skipped);
        Ok(())
    }

    /// Pop right bounds while they agree with the running current frame.
    fn unwind(
        &mut self,
        project: &Project,
        mut cur: usize,
        decision: &mut SchedulerDecision,
    ) -> Result<NextStep, SchedulerError> {
        while let Some(&right) = self.right_bound_stack.last() {
            if right <= cur || !self.has_open_frames(cur, right) {
                self.right_bound_stack.pop();
                cur = cur.max(right);
                continue;
            }
            if self.prediction_matches(project, cur, right)? {
                self.right_bound_stack.pop();
                self.fill(project, cur, right, decision)?;
                cur = right;
                continue;
            }
            let mid = self.pick_midpoint(cur, right).expect("open frames exist between bounds");
            return Ok(NextStep::AnnotateFrame(mid));
        }
        Ok(self.farthest_frame_needing_annotation(project))
    }

    /// Recompute the stack from the keyframes after an out-of-order submission.
    ///
    /// The clean prefix ends at the last keyframe before the first
    /// unannotated frame; every later keyframe goes on the stack, nearest on top.
    fn rebuild(&mut self, project: &Project, decision: &mut SchedulerDecision) -> Result<NextStep, SchedulerError> {
        let first_open = self.status.iter().position(|s| *s == FrameStatus::Unannotated);
        let Some(first_open) = first_open else {
            self.right_bound_stack.clear();
            return Ok(NextStep::Done);
        };
        let Some(clean_end) = self.prev_keyframe(first_open) else {
            self.right_bound_stack = self.keyframes.iter().rev().copied().collect();
            return Ok(NextStep::AnnotateFrame(first_open));
        };
        self.right_bound_stack = self.keyframes.range(clean_end + 1..).rev().copied().collect();
        self.unwind(project, clean_end, decision)
    }

    /// The first frame within `k` of the farthest keyframe that changes in
    /// sight or sound, else the `k`-th, clamped to the video.
    pub fn farthest_frame_needing_annotation(&self, project: &Project) -> NextStep {
        let Some(hf) = self.farthest_human else {
            return self.initial_step();
        };
        // Completeness guard; unreachable when every interval was resolved.
        if let Some(open) = (0..hf).find(|&i| self.status[i] == FrameStatus::Unannotated) {
            return NextStep::AnnotateFrame(open);
        }
        let last = self.n_frames - 1;
        if hf >= last {
            return NextStep::Done;
        }
        let policy = &project.policy;
        let src = &project.frames[hf];
        for i in 1..=policy.k {
            let t = hf + i;
            if t > last {
                break;
            }
            if audio_visual_change(src, &project.frames[t], policy).changed() {
                return NextStep::AnnotateFrame(t);
            }
        }
        NextStep::AnnotateFrame((hf + policy.k).min(last))
    }

    /// Predict the frame right after the current one and hold it as a proposal.
    pub fn preempt_next(&mut self, project: &Project) -> Result<(usize, SoundingAnnotation), SchedulerError> {
        let cur = self.current.ok_or(SchedulerError::NothingAnnotated)?;
        if cur + 1 >= self.n_frames {
            return Err(SchedulerError::EndOfVideo);
        }
        let src = self.annotations[cur].as_ref().ok_or(SchedulerError::NothingAnnotated)?;
        let pred = predict_annotation(src, &project.frames[cur], &project.frames[cur + 1], &project.policy)?;
        self.proposal = Some(pred.clone());
        Ok((cur + 1, pred))
    }

    /// Structural invariants; returns a description of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.status.len() != self.n_frames || self.annotations.len() != self.n_frames {
            return Err("per-frame vectors do not match n_frames".into());
        }
        if self.right_bound_stack.windows(2).any(|w| w[0] <= w[1]) {
            return Err(format!("stack not decreasing toward the top: {:?}", self.right_bound_stack));
        }
        if let Some(&bad) = self.right_bound_stack.iter().find(|&&r| !self.is_keyframe(r)) {
            return Err(format!("stacked frame {bad} is not a keyframe"));
        }
        if let (Some(p), Some(&top)) = (self.pending, self.right_bound_stack.last()) {
            if p >= top {
                return Err(format!("pending frame {p} is not left of stack top {top}"));
            }
        }
        if self.farthest_human != self.keyframes.iter().next_back().copied() {
            return Err("farthest_human is not the highest keyframe".into());
        }
        for (i, s) in self.status.iter().enumerate() {
            let has = self.annotations[i].is_some();
            let want = !matches!(s, FrameStatus::Unannotated | FrameStatus::SkippedAudioGate);
            if has != want {
                return Err(format!("frame {i} status {s:?} disagrees with stored annotation"));
            }
        }
        if let Some(p) = self.pending {
            if self.status[p] != FrameStatus::Unannotated {
                return Err(format!("pending frame {p} already has status {:?}", self.status[p]));
            }
        }
        Ok(())
    }
}

fn same_items(a: &[AnnotationItem], b: &[AnnotationItem]) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| x.target == y.target && x.sound_label == y.sound_label))
        && b.iter().all(|y| a.iter().any(|x| x.target == y.target && x.sound_label == y.sound_label))
}
