//! Interpolation of annotations between two agreeing keyframes, gated by audio tags.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::matching::{predict_annotation, MatchError};
use crate::model::{annotation_equal, Project, SoundingAnnotation};
use crate::scheduler::{FrameStatus, SessionState};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropagationError {
    #[error("populate range ({left}, {right}) is empty or reversed")]
    BadRange { left: usize, right: usize },
    #[error("frame {0} is not a human keyframe")]
    NotKeyframe(usize),
    #[error("prediction from {left} does not agree with the annotation of {right}")]
    Disagree { left: usize, right: usize },
    #[error(transparent)]
    Match(#[from] MatchError),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopulateOutcome {
    pub annotated: Vec<(usize, SoundingAnnotation)>,
    pub skipped: Vec<usize>,
}

/// Fill every frame strictly between `left` and `right` with the prediction
/// from `left`.
///
/// A frame whose confident audio tags do not cover every sound label of the
/// left annotation is marked `skipped_audio_gate` and left empty. Keyframes
/// inside the range are never touched.
pub fn populate(
    state: &mut SessionState,
    project: &Project,
    left: usize,
    right: usize,
) -> Result<PopulateOutcome, PropagationError> {
    if left >= right || right >= state.n_frames {
        return Err(PropagationError::BadRange { left, right });
    }
    let policy = project.policy;
    let left_ann = state.keyframe_annotation(left).ok_or(PropagationError::NotKeyframe(left))?.clone();
    let right_ann = state.keyframe_annotation(right).ok_or(PropagationError::NotKeyframe(right))?;
    let left_frame = &project.frames[left];
    let right_frame = &project.frames[right];
    let pred = predict_annotation(&left_ann, left_frame, right_frame, &policy)?;
    if !annotation_equal(&pred, right_ann, right_frame, &policy) {
        return Err(PropagationError::Disagree { left, right });
    }

    let video_tags: BTreeSet<&str> = left_ann.sound_labels();
    let mut outcome = PopulateOutcome::default();
    for i in left + 1..right {
        if state.is_keyframe(i)
            || matches!(state.status[i], FrameStatus::Human | FrameStatus::AutoModified)
        {
            continue;
        }
        let frame = &project.frames[i];
        let heard = frame.confident_tags(policy.tag_threshold);
        if video_tags.is_subset(&heard) {
            let ann = predict_annotation(&left_ann, left_frame, frame, &policy)?;
            state.status[i] = FrameStatus::Auto;
            state.annotations[i] = Some(ann.clone());
            outcome.annotated.push((i, ann));
        } else {
            state.status[i] = FrameStatus::SkippedAudioGate;
            state.annotations[i] = None;
            outcome.skipped.push(i);
        }
    }
    Ok(outcome)
}
