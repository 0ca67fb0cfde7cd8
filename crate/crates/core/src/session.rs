//! An annotation session: scheduler state plus the operation log that
//! reproduces it.
//!
//! Every mutation is a human record followed by the system records it
//! caused. Replaying the human records through a fresh engine must emit the
//! same system records; anything else is reported as divergence.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::eval::{session_stats, GroundTruth, SessionStats};
use crate::model::{Project, SoundingAnnotation};
use crate::perception::RerankerModel;
use crate::scheduler::{FrameStatus, NextStep, SchedulerDecision, SchedulerError, SessionMode, SessionState};
use crate::store::{
    self, now_ms, read_json, write_json, Actor, ExportFrame, LoadedProject, LogRecord, OpKind, SessionWriter,
    StoreError,
};

pub const SESSION_FILE: &str = "session.json";

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionMeta {
    pub id: String,
    pub project_id: String,
    pub mode: SessionMode,
    pub created_at_ms: u64,
}

#[derive(Debug)]
pub struct Session {
    pub meta: SessionMeta,
    project: Arc<Project>,
    pub state: SessionState,
    pub reranker: RerankerModel,
    pub log: Vec<LogRecord>,
    /// Number of human operations applied; echoed to clients for optimistic concurrency.
    pub revision: u64,
    writer: Option<SessionWriter>,
    last_decision_ms: u64,
}

impl Session {
    /// A session kept only in memory.
    pub fn in_memory(id: impl Into<String>, project_id: impl Into<String>, project: Arc<Project>, mode: SessionMode) -> Self {
        let n = project.n_frames();
        Self {
            meta: SessionMeta { id: id.into(), project_id: project_id.into(), mode, created_at_ms: now_ms() },
            project,
            state: SessionState::with_mode(n, mode),
            reranker: RerankerModel::default(),
            log: Vec::new(),
            revision: 0,
            writer: None,
            last_decision_ms: now_ms(),
        }
    }

    /// Create a new persisted session under the project's `sessions/` directory.
    pub fn create(project: &LoadedProject, shared: Arc<Project>, mode: SessionMode) -> Result<Self, SessionError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let dir = project.sessions_dir().join(&id);
        let writer = SessionWriter::acquire(&dir)?;
        let mut s = Self::in_memory(id, project.manifest.id.clone(), shared, mode);
        write_json(&dir.join(SESSION_FILE), &s.meta)?;
        s.writer = Some(writer);
        Ok(s)
    }

    /// Load a persisted session by replaying its log. With `write`, the
    /// session's writer lock is taken and further operations are appended.
    pub fn open(project: &LoadedProject, shared: Arc<Project>, id: &str, write: bool) -> Result<Self, SessionError> {
        let dir = session_dir(project, id);
        if !dir.join(SESSION_FILE).exists() {
            return Err(StoreError::UnknownSession(id.to_string()).into());
        }
        let meta: SessionMeta = read_json(&dir.join(SESSION_FILE))?;
        let writer = if write { Some(SessionWriter::acquire(&dir)?) } else { None };
        let records = store::read_log(&dir)?;
        let mut s = Self::replay(meta, shared, &records)?;
        s.writer = writer;
        Ok(s)
    }

    /// Rebuild a session from its log, checking that every system record is reproduced.
    pub fn replay(meta: SessionMeta, project: Arc<Project>, records: &[LogRecord]) -> Result<Self, SessionError> {
        let mut s = Self::in_memory(meta.id.clone(), meta.project_id.clone(), project, meta.mode);
        s.meta = meta;
        let mut i = 0;
        while i < records.len() {
            let r = &records[i];
            if r.actor != Actor::Human {
                return Err(diverged(r.seq, "system record without a preceding human operation"));
            }
            let before = s.log.len();
            match r.op {
                OpKind::Annotate | OpKind::Modify => {
                    let frame = r.payload["frame"].as_u64().ok_or_else(|| diverged(r.seq, "missing frame"))?;
                    let ann: SoundingAnnotation = serde_json::from_value(r.payload["annotation"].clone())
                        .map_err(|e| diverged(r.seq, &format!("bad annotation: {e}")))?;
                    s.submit(frame as usize, ann)?;
                }
                OpKind::Navigate if r.payload["action"] == "preempt" => {
                    s.preempt()?;
                }
                _ => return Err(diverged(r.seq, "unexpected human operation")),
            }
            let produced = s.log[before..].to_vec();
            for (k, p) in produced.iter().enumerate() {
                let Some(logged) = records.get(i + k) else {
                    return Err(diverged(p.seq, "log ends before the recorded effects"));
                };
                if k > 0 && (logged.actor != p.actor || logged.op != p.op || logged.payload != p.payload) {
                    return Err(diverged(logged.seq, "system effect differs from the recorded one"));
                }
                if k == 0 && logged.op != p.op {
                    return Err(diverged(logged.seq, "operation kind differs"));
                }
            }
            // Keep the original records, timestamps included.
            s.log.truncate(before);
            s.log.extend_from_slice(&records[i..i + produced.len()]);
            i += produced.len();
        }
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.meta.id
    }

    pub fn project(&self) -> &Arc<Project> {
        &self.project
    }

    pub fn is_persistent(&self) -> bool {
        self.writer.is_some()
    }

    pub fn next_step(&self) -> NextStep {
        self.state.initial_step()
    }

    fn push(&mut self, actor: Actor, op: OpKind, payload: Value) -> Result<(), SessionError> {
        let seq = self.log.last().map_or(0, |r| r.seq) + 1;
        let record = LogRecord::new(seq, now_ms(), actor, op, payload);
        if let Some(w) = self.writer.as_mut() {
            w.append(&record)?;
        }
        self.log.push(record);
        Ok(())
    }

    /// Apply a human annotation of `frame` and return the scheduler's decision.
    pub fn submit(&mut self, frame: usize, annotation: SoundingAnnotation) -> Result<SchedulerDecision, SessionError> {
        let op = match self.state.status.get(frame) {
            Some(FrameStatus::Auto | FrameStatus::AutoModified) => OpKind::Modify,
            _ => OpKind::Annotate,
        };
        let payload = json!({
            "frame": frame,
            "annotation": annotation,
            "elapsed_ms": now_ms().saturating_sub(self.last_decision_ms),
        });
        let mut trial = self.state.clone();
        let decision = trial.on_human_annotation(&self.project, frame, annotation)?;
        self.state = trial;
        if let Some(stored) = &self.state.annotations[frame] {
            self.reranker.learn(stored, &self.project.frames[frame]);
        }
        self.revision += 1;
        self.push(Actor::Human, op, payload)?;
        for &(from, to) in &decision.populated {
            let frames: Vec<usize> =
                (from + 1..to).filter(|&i| self.state.status[i] == FrameStatus::Auto).collect();
            self.push(Actor::System, OpKind::Populate, json!({"from": from, "to": to, "frames": frames}))?;
        }
        if !decision.skipped.is_empty() {
            self.push(Actor::System, OpKind::Skip, json!({"frames": decision.skipped}))?;
        }
        self.push(Actor::System, OpKind::Navigate, json!({"next": decision.next}))?;
        self.last_decision_ms = now_ms();
        Ok(decision)
    }

    /// Propose the frame after the current one; the proposal is held until confirmed.
    pub fn preempt(&mut self) -> Result<(usize, SoundingAnnotation), SessionError> {
        let (frame, pred) = self.state.preempt_next(&self.project)?;
        self.revision += 1;
        self.push(Actor::Human, OpKind::Navigate, json!({"action": "preempt"}))?;
        self.push(Actor::System, OpKind::Navigate, json!({"proposal": pred}))?;
        Ok((frame, pred))
    }

    pub fn export(&self) -> Vec<ExportFrame> {
        store::export(&self.project, &self.state)
    }

    pub fn stats(&self, truth: Option<&GroundTruth>) -> SessionStats {
        session_stats(&self.project, &self.state, truth)
    }

    /// Hex SHA-256 over the serialized state and export.
    pub fn state_hash(&self) -> String {
        state_hash(&self.state, &self.export())
    }
}

pub fn state_hash(state: &SessionState, export: &[ExportFrame]) -> String {
    let body = serde_json::to_vec(&(state, export)).expect("state serializes");
    hex::encode(Sha256::digest(&body))
}

pub fn session_dir(project: &LoadedProject, id: &str) -> PathBuf {
    project.sessions_dir().join(id)
}

/// Find a session id under any of `projects` by looking for its directory.
pub fn locate_session<'a>(projects: impl IntoIterator<Item = &'a Path>, id: &str) -> Option<PathBuf> {
    projects
        .into_iter()
        .find(|p| p.join(store::SESSIONS_DIR).join(id).join(SESSION_FILE).exists())
        .map(Path::to_path_buf)
}

fn diverged(seq: u64, reason: &str) -> SessionError {
    StoreError::ReplayDiverged { seq, reason: reason.into() }.into()
}
