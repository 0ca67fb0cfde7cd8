//! Detector, tagger and candidate re-ranker interfaces.
//!
//! Neural inference happens offline or behind an HTTP endpoint. The engine
//! only sees [`Detector`] and [`Tagger`]: the sidecar adapter serves
//! precomputed JSON, the remote adapter posts `{"frame_index": n}` to
//! `<base>/detect` and `<base>/tag`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AudioTag, DetectedObject, FrameRecord, Project, Provenance, SoundingAnnotation, Target};

/// Environment variable naming the remote inference base URL.
pub const INFER_URL_ENV: &str = "AVLOOP_INFER_URL";

#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error("frame {0} is not covered by the adapter")]
    UnknownFrame(usize),
    /// Timeouts, connection failures and 5xx responses; the caller may retry.
    #[error("inference service unavailable: {0}")]
    Retryable(String),
    #[error("inference service rejected the request: {0}")]
    Rejected(String),
}

impl PerceptionError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, PerceptionError::Retryable(_))
    }
}

pub trait Detector: Send + Sync {
    fn detect(&self, frame_index: usize) -> Result<Vec<DetectedObject>, PerceptionError>;
}

pub trait Tagger: Send + Sync {
    fn tag(&self, frame_index: usize) -> Result<Vec<AudioTag>, PerceptionError>;
}

/// Serves the detections and tags loaded from a project's sidecars.
#[derive(Debug, Clone)]
pub struct SidecarAdapter {
    project: Arc<Project>,
}

impl SidecarAdapter {
    pub fn new(project: Arc<Project>) -> Self {
        Self { project }
    }

    fn frame(&self, i: usize) -> Result<&FrameRecord, PerceptionError> {
        self.project.frame(i).ok_or(PerceptionError::UnknownFrame(i))
    }
}

impl Detector for SidecarAdapter {
    fn detect(&self, frame_index: usize) -> Result<Vec<DetectedObject>, PerceptionError> {
        Ok(self.frame(frame_index)?.detections.clone())
    }
}

impl Tagger for SidecarAdapter {
    fn tag(&self, frame_index: usize) -> Result<Vec<AudioTag>, PerceptionError> {
        Ok(self.frame(frame_index)?.audio_tags.clone())
    }
}

#[derive(Serialize)]
struct FrameQuery {
    frame_index: usize,
}

#[derive(Deserialize)]
struct DetectReply {
    objects: Vec<DetectedObject>,
}

#[derive(Deserialize)]
struct TagReply {
    tags: Vec<AudioTag>,
}

/// Blocking HTTP client for a live inference service.
#[derive(Debug, Clone)]
pub struct RemoteAdapter {
    base: String,
    client: reqwest::blocking::Client,
}

impl RemoteAdapter {
    pub fn new(base_url: &str, timeout: Duration) -> Result<Self, PerceptionError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| PerceptionError::Rejected(e.to_string()))?;
        Ok(Self { base: base_url.trim_end_matches('/').to_string(), client })
    }

    /// Adapter for `AVLOOP_INFER_URL`, if set.
    pub fn from_env(timeout: Duration) -> Option<Result<Self, PerceptionError>> {
        std::env::var(INFER_URL_ENV).ok().filter(|s| !s.is_empty()).map(|u| Self::new(&u, timeout))
    }

    fn post<T: for<'de> Deserialize<'de>>(&self, route: &str, frame_index: usize) -> Result<T, PerceptionError> {
        let resp = self
            .client
            .post(format!("{}/{route}", self.base))
            .json(&FrameQuery { frame_index })
            .send()
            .map_err(|e| PerceptionError::Retryable(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() {
            return Err(PerceptionError::Retryable(format!("{route}: HTTP {status}")));
        }
        if status.as_u16() == 404 {
            return Err(PerceptionError::UnknownFrame(frame_index));
        }
        if !status.is_success() {
            return Err(PerceptionError::Rejected(format!("{route}: HTTP {status}")));
        }
        resp.json::<T>().map_err(|e| {
            if e.is_timeout() {
                PerceptionError::Retryable(e.to_string())
            } else {
                PerceptionError::Rejected(e.to_string())
            }
        })
    }
}

impl Detector for RemoteAdapter {
    fn detect(&self, frame_index: usize) -> Result<Vec<DetectedObject>, PerceptionError> {
        self.post::<DetectReply>("detect", frame_index).map(|r| r.objects)
    }
}

impl Tagger for RemoteAdapter {
    fn tag(&self, frame_index: usize) -> Result<Vec<AudioTag>, PerceptionError> {
        self.post::<TagReply>("tag", frame_index).map(|r| r.tags)
    }
}

/// Sound-label to object-class co-occurrence counts learned from human annotations.
///
/// Stands in for a learned visual-sound grounding model behind the same
/// rank/learn interface.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RerankerModel {
    pub counts: BTreeMap<String, BTreeMap<String, u64>>,
}

impl RerankerModel {
    pub fn count(&self, sound_label: &str, class_label: &str) -> u64 {
        self.counts.get(sound_label).and_then(|m| m.get(class_label)).copied().unwrap_or(0)
    }

    /// Count every human-provenance item that selected a detector candidate.
    pub fn learn(&mut self, annotation: &SoundingAnnotation, frame: &FrameRecord) {
        for item in &annotation.items {
            if item.provenance != Provenance::Human {
                continue;
            }
            let Target::DetectionId(id) = item.target else { continue };
            let Some(det) = frame.detection(id) else { continue };
            *self
                .counts
                .entry(item.sound_label.clone())
                .or_default()
                .entry(det.class_label.clone())
                .or_default() += 1;
        }
    }

    pub fn merge(&mut self, other: &RerankerModel) {
        for (sound, classes) in &other.counts {
            let row = self.counts.entry(sound.clone()).or_default();
            for (class, n) in classes {
                *row.entry(class.clone()).or_default() += n;
            }
        }
    }
}

/// Order candidates by co-occurrence with the frame's confident tags, then
/// detector confidence, then id. Nothing is dropped.
pub fn rank_candidates(
    detections: &[DetectedObject],
    audio_tags: &[AudioTag],
    model: &RerankerModel,
    tag_threshold: f64,
) -> Vec<DetectedObject> {
    let heard: Vec<&str> = audio_tags
        .iter()
        .filter(|t| t.confidence >= tag_threshold)
        .map(|t| t.label.as_str())
        .collect();
    let mut scored: Vec<(u64, &DetectedObject)> = detections
        .iter()
        .map(|d| (heard.iter().map(|t| model.count(t, &d.class_label)).sum(), d))
        .collect();
    scored.sort_by(|(sa, a), (sb, b)| {
        sb.cmp(sa).then(b.confidence.total_cmp(&a.confidence)).then(a.id.cmp(&b.id))
    });
    scored.into_iter().map(|(_, d)| d.clone()).collect()
}
