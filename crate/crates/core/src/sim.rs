//! Simulated annotator: answers every requested frame from ground truth,
//! optionally with drawing jitter and wrong candidate picks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{GroundTruth, SessionStats};
use crate::model::{AnnotationItem, BoundingBox, DetectedObject, SoundingAnnotation, Target};
use crate::scheduler::NextStep;
use crate::session::{Session, SessionError};
use crate::store::ExportFrame;

/// A candidate counts as the true object when its IoU with the truth reaches this.
pub const PICK_IOU: f64 = 0.8;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid annotator policy: {0}")]
    Policy(String),
    #[error("ground truth has no entry for frame {0}")]
    MissingTruth(usize),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("workbench: {0}")]
    Workbench(String),
    #[error("session did not finish within {0} submissions")]
    Runaway(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimAnnotatorPolicy {
    pub box_jitter_px: f64,
    pub wrong_pick_prob: f64,
    pub seed: u64,
}

impl SimAnnotatorPolicy {
    pub fn perfect(seed: u64) -> Self {
        Self { box_jitter_px: 0.0, wrong_pick_prob: 0.0, seed }
    }

    pub fn noisy(seed: u64) -> Self {
        Self { box_jitter_px: 2.0, wrong_pick_prob: 0.05, seed }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.box_jitter_px >= 0.0 && self.box_jitter_px.is_finite()) {
            return Err(SimError::Policy("box_jitter_px must be finite and non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.wrong_pick_prob) {
            return Err(SimError::Policy("wrong_pick_prob must be in [0, 1)".into()));
        }
        Ok(())
    }
}

/// What the annotator sees of a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameView {
    pub frame_index: usize,
    pub candidates: Vec<DetectedObject>,
}

/// The operations a simulated annotator needs, served in-process or over HTTP.
pub trait Workbench {
    fn next_frame(&mut self) -> Result<Option<usize>, SimError>;
    fn view(&mut self, frame: usize) -> Result<FrameView, SimError>;
    fn submit(&mut self, frame: usize, annotation: SoundingAnnotation) -> Result<Option<usize>, SimError>;
    fn export(&mut self) -> Result<Vec<ExportFrame>, SimError>;
}

impl Workbench for Session {
    fn next_frame(&mut self) -> Result<Option<usize>, SimError> {
        Ok(self.next_step().frame())
    }

    fn view(&mut self, frame: usize) -> Result<FrameView, SimError> {
        let f = self.project().frame(frame).ok_or_else(|| SimError::Workbench(format!("no frame {frame}")))?;
        Ok(FrameView { frame_index: frame, candidates: f.detections.clone() })
    }

    fn submit(&mut self, frame: usize, annotation: SoundingAnnotation) -> Result<Option<usize>, SimError> {
        Ok(Session::submit(self, frame, annotation)?.next.frame())
    }

    fn export(&mut self) -> Result<Vec<ExportFrame>, SimError> {
        Ok(Session::export(self))
    }
}

/// Seeded answer generator.
pub struct SimAnnotator {
    policy: SimAnnotatorPolicy,
    truth: Vec<ExportFrame>,
    rng: ChaCha8Rng,
    jitter: Option<Normal<f64>>,
}

impl SimAnnotator {
    pub fn new(policy: SimAnnotatorPolicy, truth: Vec<ExportFrame>) -> Result<Self, SimError> {
        policy.validate()?;
        let jitter = (policy.box_jitter_px > 0.0)
            .then(|| Normal::new(0.0, policy.box_jitter_px).expect("validated sigma"));
        Ok(Self { rng: ChaCha8Rng::seed_from_u64(policy.seed), policy, truth, jitter })
    }

    fn truth_for(&self, frame: usize) -> Result<&ExportFrame, SimError> {
        self.truth.iter().find(|f| f.frame_index == frame).ok_or(SimError::MissingTruth(frame))
    }

    fn draw(&mut self, b: &BoundingBox) -> BoundingBox {
        let Some(n) = self.jitter else { return *b };
        let mut j = || n.sample(&mut self.rng);
        BoundingBox { x: b.x + j(), y: b.y + j(), w: (b.w + j()).max(1.0), h: (b.h + j()).max(1.0) }
    }

    /// The annotation a human would give for `view`: pick the candidate
    /// matching each true box, else draw the box by hand.
    pub fn answer(&mut self, view: &FrameView) -> Result<SoundingAnnotation, SimError> {
        let truth = self.truth_for(view.frame_index)?.clone();
        let mut used: BTreeSet<u32> = BTreeSet::new();
        let mut drawn: Vec<BoundingBox> = Vec::new();
        let mut items = Vec::with_capacity(truth.items.len());
        for t in &truth.items {
            let best = view
                .candidates
                .iter()
                .filter(|c| !used.contains(&c.id.0))
                .map(|c| (c.bbox.iou(&t.bbox), c))
                .filter(|(iou, _)| *iou >= PICK_IOU)
                .max_by(|(a, ca), (b, cb)| a.total_cmp(b).then(cb.id.cmp(&ca.id)))
                .map(|(_, c)| c.id);
            let mut target = match best {
                Some(id) => Target::DetectionId(id),
                None => Target::CustomBox(self.draw(&t.bbox)),
            };
            if self.policy.wrong_pick_prob > 0.0 && self.rng.random_bool(self.policy.wrong_pick_prob) {
                let others: Vec<_> = view
                    .candidates
                    .iter()
                    .filter(|c| !used.contains(&c.id.0) && Target::DetectionId(c.id) != target)
                    .map(|c| c.id)
                    .collect();
                if !others.is_empty() {
                    target = Target::DetectionId(others[self.rng.random_range(0..others.len())]);
                }
            }
            match target {
                Target::DetectionId(id) => {
                    used.insert(id.0);
                }
                Target::CustomBox(b) => {
                    if drawn.contains(&b) {
                        continue;
                    }
                    drawn.push(b);
                }
            }
            items.push(AnnotationItem::human(target, t.sound_label.clone()));
        }
        Ok(SoundingAnnotation::new(view.frame_index, items))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    /// Frames requested, in order.
    pub requested: Vec<usize>,
    pub export: Vec<ExportFrame>,
}

/// Answer requests until the workbench reports nothing left to annotate.
pub fn run<W: Workbench + ?Sized>(bench: &mut W, annotator: &mut SimAnnotator, n_frames: usize) -> Result<SimOutcome, SimError> {
    let limit = 4 * n_frames + 16;
    let mut requested = Vec::new();
    let mut next = bench.next_frame()?;
    while let Some(f) = next {
        if requested.len() >= limit {
            return Err(SimError::Runaway(limit));
        }
        requested.push(f);
        let view = bench.view(f)?;
        let ann = annotator.answer(&view)?;
        next = bench.submit(f, ann)?;
    }
    Ok(SimOutcome { requested, export: bench.export()? })
}

/// Simulate on an in-memory session and report statistics against the truth.
pub fn simulate_session(
    session: &mut Session,
    truth: &[ExportFrame],
    policy: SimAnnotatorPolicy,
) -> Result<(SessionStats, SimOutcome), SimError> {
    let mut annotator = SimAnnotator::new(policy, truth.to_vec())?;
    let n = session.state.n_frames;
    let outcome = run(session, &mut annotator, n)?;
    debug_assert_eq!(session.next_step(), NextStep::Done);
    let stats = session.stats(Some(&GroundTruth::single(truth.to_vec())));
    Ok((stats, outcome))
}
