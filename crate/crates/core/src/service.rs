//! HTTP session service.
//!
//! Routes are mounted under both `/api/v1` and `/api`. Project files
//! (frames, audio clips) are served from `/files/{project}/...`.
//!
//! Mutating requests may carry the session `revision` they were based on;
//! a mismatch is rejected with 409 so two clients cannot interleave blindly.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Body;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, Query, Request, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower::ServiceExt;
use tower_http::services::ServeDir;

use crate::eval::{GroundTruth, SessionStats};
use crate::model::{
    AnnotationItem, AudioTag, BoundingBox, DetectedObject, DetectionId, FrameDims, Project, Provenance,
    SoundingAnnotation, Target,
};
use crate::perception::{rank_candidates, Detector, PerceptionError, RemoteAdapter, Tagger, INFER_URL_ENV};
use crate::scheduler::{FrameStatus, SchedulerDecision, SchedulerError, SessionMode};
use crate::session::{Session, SessionError};
use crate::store::{self, discover_projects, ExportFrame, LoadedProject, StoreError};

pub const PORT_ENV: &str = "AVLOOP_PORT";
pub const DATA_DIR_ENV: &str = "AVLOOP_DATA_DIR";
/// Optional JSON config file in the data directory; environment variables win.
pub const CONFIG_FILE: &str = "avloop.json";
pub const DEFAULT_PORT: u16 = 8080;
pub const THUMBNAILS_PER_PAGE: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub port: u16,
    pub data_dir: PathBuf,
    pub infer_url: Option<String>,
    pub infer_timeout_ms: u64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { port: DEFAULT_PORT, data_dir: PathBuf::from("."), infer_url: None, infer_timeout_ms: 2000 }
    }
}

impl ServiceConfig {
    /// Defaults, then `avloop.json` in the data directory, then the environment.
    pub fn load(data_dir: Option<PathBuf>) -> anyhow::Result<Self> {
        let dir = data_dir
            .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let mut cfg = if dir.join(CONFIG_FILE).exists() {
            store::read_json::<ServiceConfig>(&dir.join(CONFIG_FILE))?
        } else {
            ServiceConfig::default()
        };
        cfg.data_dir = dir;
        if let Ok(p) = std::env::var(PORT_ENV) {
            cfg.port = p.parse().map_err(|_| anyhow::anyhow!("{PORT_ENV}={p:?} is not a port number"))?;
        }
        if let Ok(u) = std::env::var(INFER_URL_ENV) {
            cfg.infer_url = (!u.is_empty()).then_some(u);
        }
        Ok(cfg)
    }
}

struct ProjectEntry {
    loaded: LoadedProject,
    shared: Arc<Project>,
    truth: Option<Vec<ExportFrame>>,
}

/// Shared service state: read-only projects, one lock per session.
pub struct AppState {
    projects: BTreeMap<String, ProjectEntry>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    remote: Option<Arc<RemoteAdapter>>,
}

impl AppState {
    pub fn new(config: &ServiceConfig) -> anyhow::Result<Self> {
        let mut projects = BTreeMap::new();
        for dir in discover_projects(&config.data_dir)? {
            let loaded = LoadedProject::open(&dir)?;
            let truth = loaded.ground_truth()?;
            let id = loaded.manifest.id.clone();
            if projects.contains_key(&id) {
                anyhow::bail!("two projects share the id {id:?}");
            }
            let shared = Arc::new(loaded.project.clone());
            projects.insert(id, ProjectEntry { loaded, shared, truth });
        }
        let remote = match &config.infer_url {
            Some(u) => Some(Arc::new(RemoteAdapter::new(u, Duration::from_millis(config.infer_timeout_ms))?)),
            None => None,
        };
        Ok(Self { projects, sessions: Mutex::new(HashMap::new()), remote })
    }

    pub fn project_ids(&self) -> Vec<String> {
        self.projects.keys().cloned().collect()
    }

    fn project(&self, id: &str) -> Result<&ProjectEntry, ApiError> {
        self.projects.get(id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown project {id}")))
    }

    /// The live session, opening it from disk on first use.
    fn session(&self, sid: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let mut map = self.sessions.lock().expect("session map");
        if let Some(s) = map.get(sid) {
            return Ok(s.clone());
        }
        let entry = self
            .projects
            .values()
            .find(|p| p.loaded.sessions_dir().join(sid).is_dir())
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {sid}")))?;
        let session = Session::open(&entry.loaded, entry.shared.clone(), sid, true)?;
        let s = Arc::new(Mutex::new(session));
        map.insert(sid.to_string(), s.clone());
        Ok(s)
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.message}))).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::Scheduler(s) => match s {
                SchedulerError::OutOfRange { .. } => StatusCode::NOT_FOUND,
                SchedulerError::FrameMismatch { .. } | SchedulerError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
                SchedulerError::NothingAnnotated | SchedulerError::EndOfVideo => StatusCode::CONFLICT,
                SchedulerError::Match(_) | SchedulerError::Propagation(_) => StatusCode::INTERNAL_SERVER_ERROR,
            },
            SessionError::Store(StoreError::Locked(_)) => StatusCode::CONFLICT,
            SessionError::Store(StoreError::UnknownSession(_)) => StatusCode::NOT_FOUND,
            SessionError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<PerceptionError> for ApiError {
    fn from(e: PerceptionError) -> Self {
        let status = match e {
            PerceptionError::Retryable(_) => StatusCode::SERVICE_UNAVAILABLE,
            PerceptionError::UnknownFrame(_) => StatusCode::NOT_FOUND,
            PerceptionError::Rejected(_) => StatusCode::BAD_GATEWAY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(e.status(), e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;
type Shared = State<Arc<AppState>>;

// ---------------------------------------------------------------------------
// Wire types

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSummary {
    pub id: String,
    pub n_frames: usize,
    pub fps: u32,
    pub dims: FrameDims,
    pub has_ground_truth: bool,
    pub sessions: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateSession {
    pub mode: SessionMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub project_id: String,
    pub mode: SessionMode,
    pub next_frame: Option<usize>,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub project_id: String,
    pub mode: SessionMode,
    pub n_frames: usize,
    pub next_frame: Option<usize>,
    pub complete: bool,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub rank: usize,
    pub id: DetectionId,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub label: String,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemView {
    pub target: Target,
    #[serde(rename = "box")]
    pub bbox: Option<BoundingBox>,
    pub sound_label: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBundle {
    pub frame_index: usize,
    pub timestamp_ms: u64,
    pub image_url: String,
    pub audio_url: String,
    pub candidates: Vec<Candidate>,
    pub audio_tags: Vec<AudioTag>,
    /// Tags at or above the threshold, most confident first.
    pub suggested_sound_labels: Vec<String>,
    pub current_annotation: Option<Vec<ItemView>>,
    pub status: FrameStatus,
    pub is_keyframe: bool,
    /// The scheduler is waiting for this frame.
    pub requested: bool,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemInput {
    #[serde(default)]
    pub detection_id: Option<u32>,
    #[serde(default, rename = "box")]
    pub bbox: Option<BoundingBox>,
    pub sound_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationInput {
    #[serde(default)]
    pub revision: Option<u64>,
    pub items: Vec<ItemInput>,
}

impl AnnotationInput {
    /// Builds the engine-side annotation; each item names exactly one of
    /// a detection id or a drawn box.
    pub fn to_annotation(&self, frame: usize) -> Result<SoundingAnnotation, String> {
        let mut items = Vec::with_capacity(self.items.len());
        for (i, it) in self.items.iter().enumerate() {
            if it.sound_label.trim().is_empty() {
                return Err(format!("item {i}: sound_label is empty"));
            }
            let target = match (it.detection_id, it.bbox) {
                (Some(id), None) => Target::DetectionId(DetectionId(id)),
                (None, Some(b)) => {
                    b.validate().map_err(|e| format!("item {i}: {e}"))?;
                    Target::CustomBox(b)
                }
                _ => return Err(format!("item {i}: give exactly one of detection_id or box")),
            };
            items.push(AnnotationItem::human(target, it.sound_label.clone()));
        }
        Ok(SoundingAnnotation::new(frame, items))
    }

    pub fn from_annotation(annotation: &SoundingAnnotation, revision: Option<u64>) -> Self {
        let items = annotation
            .items
            .iter()
            .map(|i| match i.target {
                Target::DetectionId(id) => ItemInput { detection_id: Some(id.0), bbox: None, sound_label: i.sound_label.clone() },
                Target::CustomBox(b) => ItemInput { detection_id: None, bbox: Some(b), sound_label: i.sound_label.clone() },
            })
            .collect();
        Self { revision, items }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionResponse {
    #[serde(flatten)]
    pub decision: SchedulerDecision,
    pub next_frame: Option<usize>,
    pub revision: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RevisionInput {
    pub revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub frame: usize,
    pub annotation: Vec<ItemView>,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thumbnail {
    pub frame_index: usize,
    pub thumbnail_url: String,
    pub status: FrameStatus,
    pub badge: String,
    pub warning: Option<String>,
    pub sound_labels: Vec<String>,
    pub item_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThumbnailPage {
    pub page: usize,
    pub per_page: usize,
    pub total: usize,
    pub items: Vec<Thumbnail>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct PageQuery {
    pub page: Option<usize>,
    pub per_page: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub sound_label: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaybackFrame {
    pub frame_index: usize,
    pub timestamp_ms: u64,
    pub image_url: String,
    pub audio_url: String,
    pub status: FrameStatus,
    pub overlays: Vec<Overlay>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderHint {
    pub label_style: String,
    pub label_background: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Playback {
    pub fps: u32,
    pub render_hint: RenderHint,
    pub frames: Vec<PlaybackFrame>,
}

pub const SKIPPED_WARNING: &str = "audio tags at this frame do not contain the sound being propagated; annotate it by hand";

// ---------------------------------------------------------------------------
// Handlers

fn file_url(project_id: &str, rel: &str) -> String {
    format!("/files/{project_id}/{rel}")
}

fn check_revision(session: &Session, claimed: Option<u64>) -> Result<(), ApiError> {
    match claimed {
        Some(r) if r != session.revision => Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("stale revision {r}; session is at {}", session.revision),
        )),
        _ => Ok(()),
    }
}

fn item_views(annotation: &SoundingAnnotation, project: &Project) -> Vec<ItemView> {
    let frame = &project.frames[annotation.frame_index];
    annotation
        .items
        .iter()
        .map(|i| ItemView {
            target: i.target,
            bbox: i.target.resolve(frame),
            sound_label: i.sound_label.clone(),
            provenance: i.provenance,
        })
        .collect()
}

async fn list_projects(State(app): Shared) -> ApiResult<Vec<ProjectSummary>> {
    Ok(Json(
        app.projects
            .iter()
            .map(|(id, p)| ProjectSummary {
                id: id.clone(),
                n_frames: p.loaded.manifest.n_frames,
                fps: p.loaded.manifest.fps,
                dims: p.loaded.manifest.dims,
                has_ground_truth: p.truth.is_some(),
                sessions: store::list_sessions(&p.loaded.dir),
            })
            .collect(),
    ))
}

async fn create_session(
    State(app): Shared,
    UrlPath(pid): UrlPath<String>,
    body: Option<Json<CreateSession>>,
) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let entry = app.project(&pid)?;
    let mode = body.map(|b| b.0.mode).unwrap_or_default();
    let session = Session::create(&entry.loaded, entry.shared.clone(), mode)?;
    let created = SessionCreated {
        session_id: session.id().to_string(),
        project_id: pid,
        mode,
        next_frame: session.next_step().frame(),
        revision: session.revision,
    };
    tracing::info!(session = %created.session_id, project = %created.project_id, "session created");
    app.sessions.lock().expect("session map").insert(created.session_id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(created)))
}

async fn get_session(State(app): Shared, UrlPath(sid): UrlPath<String>) -> ApiResult<SessionSummary> {
    let s = app.session(&sid)?;
    let s = s.lock().expect("session lock");
    Ok(Json(SessionSummary {
        session_id: s.id().to_string(),
        project_id: s.meta.project_id.clone(),
        mode: s.meta.mode,
        n_frames: s.state.n_frames,
        next_frame: s.next_step().frame(),
        complete: s.state.is_complete(),
        revision: s.revision,
    }))
}

async fn get_frame(State(app): Shared, UrlPath((sid, n)): UrlPath<(String, usize)>) -> ApiResult<FrameBundle> {
    let handle = app.session(&sid)?;
    let (project_id, project, status, is_keyframe, requested, revision, current, model) = {
        let s = handle.lock().expect("session lock");
        if n >= s.state.n_frames {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                format!("frame {n} is out of range (video has {} frames)", s.state.n_frames),
            ));
        }
        (
            s.meta.project_id.clone(),
            s.project().clone(),
            s.state.status[n],
            s.state.is_keyframe(n),
            s.state.pending == Some(n),
            s.revision,
            s.state.annotations[n].clone(),
            s.reranker.clone(),
        )
    };
    let (detections, tags): (Vec<DetectedObject>, Vec<AudioTag>) = match &app.remote {
        Some(remote) => {
            let remote = remote.clone();
            tokio::task::spawn_blocking(move || -> Result<_, PerceptionError> {
                Ok((remote.detect(n)?, remote.tag(n)?))
            })
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??
        }
        None => (project.frames[n].detections.clone(), project.frames[n].audio_tags.clone()),
    };
    let threshold = project.policy.tag_threshold;
    let candidates = rank_candidates(&detections, &tags, &model, threshold)
        .into_iter()
        .enumerate()
        .map(|(rank, d)| Candidate { rank: rank + 1, id: d.id, bbox: d.bbox, label: d.class_label, confidence: d.confidence })
        .collect();
    let mut suggested: Vec<&AudioTag> = tags.iter().filter(|t| t.confidence >= threshold).collect();
    suggested.sort_by(|a, b| b.confidence.total_cmp(&a.confidence).then(a.label.cmp(&b.label)));
    let frame = &project.frames[n];
    Ok(Json(FrameBundle {
        frame_index: n,
        timestamp_ms: frame.timestamp_ms,
        image_url: file_url(&project_id, &frame.image_ref),
        audio_url: file_url(&project_id, &store::audio_clip_name(n)),
        candidates,
        suggested_sound_labels: suggested.iter().map(|t| t.label.clone()).collect(),
        audio_tags: tags,
        current_annotation: current.as_ref().map(|a| item_views(a, &project)),
        status,
        is_keyframe,
        requested,
        revision,
    }))
}

async fn put_annotation(
    State(app): Shared,
    UrlPath((sid, n)): UrlPath<(String, usize)>,
    body: Result<Json<AnnotationInput>, JsonRejection>,
) -> ApiResult<DecisionResponse> {
    let Json(input) = body?;
    let handle = app.session(&sid)?;
    let mut s = handle.lock().expect("session lock");
    check_revision(&s, input.revision)?;
    if n >= s.state.n_frames {
        return Err(ApiError::new(StatusCode::NOT_FOUND, format!("frame {n} is out of range")));
    }
    let annotation = input.to_annotation(n).map_err(|m| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, m))?;
    let decision = s.submit(n, annotation)?;
    Ok(Json(DecisionResponse { next_frame: decision.next.frame(), decision, revision: s.revision }))
}

async fn post_next(
    State(app): Shared,
    UrlPath(sid): UrlPath<String>,
    body: Option<Json<RevisionInput>>,
) -> ApiResult<Proposal> {
    let handle = app.session(&sid)?;
    let mut s = handle.lock().expect("session lock");
    check_revision(&s, body.and_then(|b| b.0.revision))?;
    let (frame, pred) = s.preempt()?;
    Ok(Json(Proposal { frame, annotation: item_views(&pred, s.project()), revision: s.revision }))
}

async fn thumbnails(
    State(app): Shared,
    UrlPath(sid): UrlPath<String>,
    Query(q): Query<PageQuery>,
) -> ApiResult<ThumbnailPage> {
    let handle = app.session(&sid)?;
    let s = handle.lock().expect("session lock");
    let per_page = q.per_page.unwrap_or(THUMBNAILS_PER_PAGE).clamp(1, 1000);
    let page = q.page.unwrap_or(1).max(1);
    let total = s.state.n_frames;
    let items = (0..total)
        .skip((page - 1) * per_page)
        .take(per_page)
        .map(|i| {
            let status = s.state.status[i];
            let labels: Vec<String> = s.state.annotations[i]
                .as_ref()
                .map(|a| a.sound_labels().into_iter().map(String::from).collect())
                .unwrap_or_default();
            Thumbnail {
                frame_index: i,
                thumbnail_url: file_url(&s.meta.project_id, &s.project().frames[i].image_ref),
                status,
                badge: status.as_str().to_string(),
                warning: (status == FrameStatus::SkippedAudioGate).then(|| SKIPPED_WARNING.to_string()),
                item_count: s.state.annotations[i].as_ref().map_or(0, |a| a.items.len()),
                sound_labels: labels,
            }
        })
        .collect();
    Ok(Json(ThumbnailPage { page, per_page, total, items }))
}

async fn playback(State(app): Shared, UrlPath(sid): UrlPath<String>) -> ApiResult<Playback> {
    let handle = app.session(&sid)?;
    let s = handle.lock().expect("session lock");
    let project = s.project().clone();
    let export = s.export();
    let frames = export
        .into_iter()
        .map(|f| {
            let rec = &project.frames[f.frame_index];
            PlaybackFrame {
                frame_index: f.frame_index,
                timestamp_ms: rec.timestamp_ms,
                image_url: file_url(&s.meta.project_id, &rec.image_ref),
                audio_url: file_url(&s.meta.project_id, &store::audio_clip_name(f.frame_index)),
                status: s.state.status[f.frame_index],
                overlays: f
                    .items
                    .into_iter()
                    .map(|i| Overlay { bbox: i.bbox, sound_label: i.sound_label, provenance: i.provenance })
                    .collect(),
            }
        })
        .collect();
    Ok(Json(Playback {
        fps: project.fps,
        render_hint: RenderHint {
            label_style: "semi-transparent white box".into(),
            label_background: "rgba(255,255,255,0.6)".into(),
        },
        frames,
    }))
}

async fn stats(State(app): Shared, UrlPath(sid): UrlPath<String>) -> ApiResult<SessionStats> {
    let handle = app.session(&sid)?;
    let s = handle.lock().expect("session lock");
    let truth = app
        .projects
        .get(&s.meta.project_id)
        .and_then(|p| p.truth.clone())
        .map(GroundTruth::single);
    Ok(Json(s.stats(truth.as_ref())))
}

async fn export(State(app): Shared, UrlPath(sid): UrlPath<String>) -> ApiResult<Vec<ExportFrame>> {
    let handle = app.session(&sid)?;
    let s = handle.lock().expect("session lock");
    Ok(Json(s.export()))
}

async fn serve_file(State(app): Shared, UrlPath((pid, rest)): UrlPath<(String, String)>, req: Request) -> Response {
    let entry = match app.project(&pid) {
        Ok(e) => e,
        Err(e) => return e.into_response(),
    };
    let uri = format!("/{rest}");
    let (mut parts, body) = req.into_parts();
    parts.uri = match uri.parse() {
        Ok(u) => u,
        Err(_) => return StatusCode::BAD_REQUEST.into_response(),
    };
    let req = Request::from_parts(parts, body);
    match ServeDir::new(&entry.loaded.dir).oneshot(req).await {
        Ok(r) => r.map(Body::new),
        Err(e) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

fn api_routes() -> Router<Arc<AppState>> {
    Router::new()
        .route("/projects", get(list_projects))
        .route("/projects/{id}/sessions", post(create_session))
        .route("/sessions/{sid}", get(get_session))
        .route("/sessions/{sid}/frames/{n}", get(get_frame))
        .route("/sessions/{sid}/frames/{n}/annotation", put(put_annotation))
        .route("/sessions/{sid}/next", post(post_next))
        .route("/sessions/{sid}/review/thumbnails", get(thumbnails))
        .route("/sessions/{sid}/review/playback", get(playback))
        .route("/sessions/{sid}/stats", get(stats))
        .route("/sessions/{sid}/export", get(export))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .nest("/api/v1", api_routes())
        .nest("/api", api_routes())
        .route("/files/{pid}/{*path}", get(serve_file))
        .with_state(state)
}

/// Bind and serve until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let state = Arc::new(AppState::new(&config)?);
    tracing::info!(projects = ?state.project_ids(), "loaded projects");
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port)).await?;
    serve_on(listener, state).await
}

/// Serve on an already bound listener until Ctrl-C.
pub async fn serve_on(listener: tokio::net::TcpListener, state: Arc<AppState>) -> anyhow::Result<()> {
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

// ---------------------------------------------------------------------------
// In-process client

/// Sends requests straight into the router without a socket.
pub struct LocalClient {
    router: Router,
    rt: tokio::runtime::Runtime,
}

impl LocalClient {
    pub fn new(state: Arc<AppState>) -> anyhow::Result<Self> {
        let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
        Ok(Self { router: router(state), rt })
    }

    pub fn open(data_dir: &Path) -> anyhow::Result<Self> {
        let cfg = ServiceConfig { data_dir: data_dir.to_path_buf(), ..ServiceConfig::default() };
        Self::new(Arc::new(AppState::new(&cfg)?))
    }

    /// Returns the status and the parsed JSON body (`Null` when empty or not JSON).
    pub fn request(&self, method: &str, uri: &str, body: Option<&Value>) -> (StatusCode, Value) {
        let (status, bytes) = self.request_raw(method, uri, body);
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    pub fn request_raw(&self, method: &str, uri: &str, body: Option<&Value>) -> (StatusCode, Vec<u8>) {
        let mut builder = axum::http::Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                builder = builder.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let req = builder.body(body).expect("valid request");
        self.rt.block_on(async {
            let resp = self.router.clone().oneshot(req).await.expect("infallible router");
            let status = resp.status();
            let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap_or_default();
            (status, bytes.to_vec())
        })
    }

    pub fn get<T: for<'de> Deserialize<'de>>(&self, uri: &str) -> Result<T, ApiError> {
        self.call("GET", uri, None)
    }

    pub fn call<T: for<'de> Deserialize<'de>>(&self, method: &str, uri: &str, body: Option<&Value>) -> Result<T, ApiError> {
        let (status, v) = self.request(method, uri, body);
        if !status.is_success() {
            let msg = v["error"].as_str().unwrap_or("request failed").to_string();
            return Err(ApiError::new(status, msg));
        }
        serde_json::from_value(v).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
    }
}

/// A simulated annotator's view of a session through the HTTP API.
pub struct ApiWorkbench<'a> {
    client: &'a LocalClient,
    pub session_id: String,
    revision: u64,
    next: Option<usize>,
}

impl<'a> ApiWorkbench<'a> {
    pub fn create(client: &'a LocalClient, project_id: &str, mode: SessionMode) -> Result<Self, ApiError> {
        let body = serde_json::to_value(CreateSession { mode }).expect("serializable");
        let created: SessionCreated = client.call("POST", &format!("/api/v1/projects/{project_id}/sessions"), Some(&body))?;
        Ok(Self { client, session_id: created.session_id, revision: created.revision, next: created.next_frame })
    }
}

impl crate::sim::Workbench for ApiWorkbench<'_> {
    fn next_frame(&mut self) -> Result<Option<usize>, crate::sim::SimError> {
        Ok(self.next)
    }

    fn view(&mut self, frame: usize) -> Result<crate::sim::FrameView, crate::sim::SimError> {
        let b: FrameBundle = self
            .client
            .get(&format!("/api/v1/sessions/{}/frames/{frame}", self.session_id))
            .map_err(api_to_sim)?;
        let candidates = b
            .candidates
            .into_iter()
            .map(|c| DetectedObject { id: c.id, bbox: c.bbox, class_label: c.label, confidence: c.confidence })
            .collect();
        Ok(crate::sim::FrameView { frame_index: frame, candidates })
    }

    fn submit(&mut self, frame: usize, annotation: SoundingAnnotation) -> Result<Option<usize>, crate::sim::SimError> {
        let body = serde_json::to_value(AnnotationInput::from_annotation(&annotation, Some(self.revision)))
            .expect("serializable");
        let d: DecisionResponse = self
            .client
            .call("PUT", &format!("/api/v1/sessions/{}/frames/{frame}/annotation", self.session_id), Some(&body))
            .map_err(api_to_sim)?;
        self.revision = d.revision;
        self.next = d.next_frame;
        Ok(d.next_frame)
    }

    fn export(&mut self) -> Result<Vec<ExportFrame>, crate::sim::SimError> {
        self.client.get(&format!("/api/v1/sessions/{}/export", self.session_id)).map_err(api_to_sim)
    }
}

fn api_to_sim(e: ApiError) -> crate::sim::SimError {
    crate::sim::SimError::Workbench(format!("HTTP {}: {}", e.status, e.message))
}
