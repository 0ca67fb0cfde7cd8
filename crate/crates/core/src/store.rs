//! On-disk project layout, sidecar formats, ingestion, export and the
//! append-only operation log.
//!
//! A project directory looks like:
//!
//! ```text
//! frames/000000.png ...        one image per frame (png or jpg)
//! audio/clip_000000.wav ...    one-second clip centred on each frame
//! audio/track.wav              optional; clips are cut from it when missing
//! sidecar/detections.json
//! sidecar/audiotags.json
//! meta.json                    optional: id, fps, source, policy overrides
//! ground_truth.json            optional: export-format reference annotations
//! project.json                 written by ingest
//! sessions/<id>/               session metadata, log and writer lock
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    frame_timestamp_ms, AudioTag, BoundingBox, DetectedObject, FrameDims, FrameRecord, MatchPolicy,
    ModelError, Project, Provenance, SoundingAnnotation, DEFAULT_FPS,
};
use crate::scheduler::SessionState;

pub const PROJECT_FILE: &str = "project.json";
pub const META_FILE: &str = "meta.json";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";
pub const DETECTIONS_SIDECAR: &str = "sidecar/detections.json";
pub const TAGS_SIDECAR: &str = "sidecar/audiotags.json";
pub const AUDIO_TRACK: &str = "audio/track.wav";
pub const SESSIONS_DIR: &str = "sessions";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("project validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("{0} has not been ingested (no project.json)")]
    NotIngested(PathBuf),
    #[error("session is locked by another writer ({0})")]
    Locked(PathBuf),
    #[error("corrupt log record after seq {last_valid_seq}: {reason}")]
    CorruptLog { last_valid_seq: u64, reason: String },
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("replay diverged at seq {seq}: {reason}")]
    ReplayDiverged { seq: u64, reason: String },
    #[error("audio: {0}")]
    Audio(String),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

pub(crate) fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| StoreError::Json { path: path.to_path_buf(), source })
}

/// Pretty JSON with a trailing newline, written atomically via a temp file.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

// ---------------------------------------------------------------------------
// Sidecars

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionFrame {
    pub index: usize,
    pub objects: Vec<DetectedObject>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectorSidecar {
    pub frames: Vec<DetectionFrame>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagFrame {
    pub index: usize,
    pub tags: Vec<AudioTag>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaggerSidecar {
    pub frames: Vec<TagFrame>,
}

/// Index a sidecar's per-frame entries, reporting gaps, duplicates and strays.
fn index_entries<T>(
    name: &str,
    entries: Vec<(usize, T)>,
    n_frames: usize,
    issues: &mut Vec<String>,
) -> BTreeMap<usize, T> {
    let mut out = BTreeMap::new();
    for (index, entry) in entries {
        if index >= n_frames {
            issues.push(format!("{name}: entry for frame {index} but the project has {n_frames} frames"));
        } else if out.insert(index, entry).is_some() {
            issues.push(format!("{name}: duplicate entry for frame {index}"));
        }
    }
    for i in 0..n_frames {
        if !out.contains_key(&i) {
            issues.push(format!("{name}: no entry for frame {i}"));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Manifest and ingestion

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProjectMeta {
    pub id: Option<String>,
    pub fps: Option<u32>,
    pub source: Option<String>,
    pub policy: Option<MatchPolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SidecarPaths {
    pub detections: String,
    pub audio_tags: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectManifest {
    pub id: String,
    pub source: Option<String>,
    pub fps: u32,
    pub n_frames: usize,
    pub dims: FrameDims,
    pub policy: MatchPolicy,
    /// Image path of each frame, relative to the project directory.
    pub frames: Vec<String>,
    pub sidecars: SidecarPaths,
    pub created_at_ms: u64,
}

impl ProjectManifest {
    pub fn audio_ref(&self, index: usize) -> String {
        audio_clip_name(index)
    }
}

pub fn audio_clip_name(index: usize) -> String {
    format!("audio/clip_{index:06}.wav")
}

fn frame_files(dir: &Path, issues: &mut Vec<String>) -> Vec<String> {
    let frames_dir = dir.join("frames");
    let Ok(entries) = fs::read_dir(&frames_dir) else {
        issues.push(format!("missing frames directory {}", frames_dir.display()));
        return Vec::new();
    };
    let mut found: BTreeMap<usize, String> = BTreeMap::new();
    for entry in entries.flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some((stem, ext)) = name.rsplit_once('.') else { continue };
        if !matches!(ext.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg") {
            continue;
        }
        if stem.len() != 6 || !stem.bytes().all(|b| b.is_ascii_digit()) {
            issues.push(format!("frames/{name}: name is not a six-digit frame index"));
            continue;
        }
        let index: usize = stem.parse().expect("six digits");
        if let Some(prev) = found.insert(index, format!("frames/{name}")) {
            issues.push(format!("frame {index} has two images ({prev}, frames/{name})"));
        }
    }
    let n = found.keys().next_back().map_or(0, |m| m + 1);
    for i in 0..n {
        if !found.contains_key(&i) {
            issues.push(format!("frame indices are not contiguous: frame {i} is missing"));
        }
    }
    if found.is_empty() {
        issues.push("no frame images found".into());
    }
    found.into_values().collect()
}

/// Validate a project directory and write its `project.json`.
///
/// Every problem found is reported at once.
pub fn ingest(dir: &Path) -> Result<ProjectManifest> {
    let mut issues = Vec::new();
    let meta: ProjectMeta = if dir.join(META_FILE).exists() {
        match read_json(&dir.join(META_FILE)) {
            Ok(m) => m,
            Err(e) => {
                issues.push(e.to_string());
                ProjectMeta::default()
            }
        }
    } else {
        ProjectMeta::default()
    };
    let fps = meta.fps.unwrap_or(DEFAULT_FPS);
    if fps == 0 {
        issues.push("fps must be positive".into());
    }
    let policy = meta.policy.unwrap_or_default();
    if let Err(e) = policy.validate() {
        issues.push(e.to_string());
    }

    let frames = frame_files(dir, &mut issues);
    let n = frames.len();

    let mut dims: Option<FrameDims> = None;
    for (i, rel) in frames.iter().enumerate() {
        match image::image_dimensions(dir.join(rel)) {
            Ok((width, height)) => {
                let d = FrameDims { width, height };
                match dims {
                    None => dims = Some(d),
                    Some(first) if first != d => issues.push(format!(
                        "frame {i} is {width}x{height}, expected {}x{}",
                        first.width, first.height
                    )),
                    _ => {}
                }
            }
            Err(e) => issues.push(format!("{rel}: unreadable image: {e}")),
        }
    }

    if fps > 0 && n > 0 {
        let missing: Vec<usize> = (0..n).filter(|&i| !dir.join(audio_clip_name(i)).exists()).collect();
        if !missing.is_empty() && dir.join(AUDIO_TRACK).exists() {
            if let Err(e) = cut_clips(dir, n, fps) {
                issues.push(e.to_string());
            }
        } else {
            for i in missing {
                issues.push(format!("missing audio clip {}", audio_clip_name(i)));
            }
        }
    }

    let dims_or_default = dims.unwrap_or(FrameDims { width: 0, height: 0 });
    if n > 0 {
        let _ = load_frames(dir, n, fps.max(1), dims_or_default, &frames, &mut issues);
    }

    if !issues.is_empty() {
        return Err(StoreError::Validation(issues));
    }
    let id = meta.id.unwrap_or_else(|| {
        dir.canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "project".into())
    });
    let manifest = ProjectManifest {
        id,
        source: meta.source,
        fps,
        n_frames: n,
        dims: dims_or_default,
        policy,
        frames,
        sidecars: SidecarPaths {
            detections: DETECTIONS_SIDECAR.into(),
            audio_tags: TAGS_SIDECAR.into(),
        },
        created_at_ms: now_ms(),
    };
    write_json(&dir.join(PROJECT_FILE), &manifest)?;
    Ok(manifest)
}

/// Parse both sidecars into frame records, clamping boxes to the frame.
fn load_frames(
    dir: &Path,
    n: usize,
    fps: u32,
    dims: FrameDims,
    images: &[String],
    issues: &mut Vec<String>,
) -> Vec<FrameRecord> {
    let detections = match read_json::<DetectorSidecar>(&dir.join(DETECTIONS_SIDECAR)) {
        Ok(s) => index_entries(
            "detections.json",
            s.frames.into_iter().map(|f| (f.index, f.objects)).collect(),
            n,
            issues,
        ),
        Err(e) => {
            issues.push(e.to_string());
            BTreeMap::new()
        }
    };
    let tags = match read_json::<TaggerSidecar>(&dir.join(TAGS_SIDECAR)) {
        Ok(s) => index_entries(
            "audiotags.json",
            s.frames.into_iter().map(|f| (f.index, f.tags)).collect(),
            n,
            issues,
        ),
        Err(e) => {
            issues.push(e.to_string());
            BTreeMap::new()
        }
    };
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let mut objects = detections.get(&i).cloned().unwrap_or_default();
        if dims.width > 0 {
            for o in &mut objects {
                match o.bbox.clamp_to(dims.width, dims.height) {
                    Ok(b) => o.bbox = b,
                    Err(e) => issues.push(format!("detections.json frame {i} object {}: {e}", o.id.0)),
                }
            }
        }
        let record = FrameRecord {
            index: i,
            timestamp_ms: frame_timestamp_ms(i, fps),
            image_ref: images.get(i).cloned().unwrap_or_default(),
            detections: objects,
            audio_tags: tags.get(&i).cloned().unwrap_or_default(),
        };
        if let Err(e) = record.validate() {
            issues.push(format!("frame {i}: {e}"));
        }
        frames.push(record);
    }
    frames
}

/// Cut `audio/track.wav` into one-second clips centred on each frame.
fn cut_clips(dir: &Path, n: usize, fps: u32) -> Result<()> {
    let track = dir.join(AUDIO_TRACK);
    let mut reader = hound::WavReader::open(&track).map_err(|e| StoreError::Audio(format!("{}: {e}", track.display())))?;
    let spec = reader.spec();
    let samples: Vec<i32> = match spec.sample_format {
        hound::SampleFormat::Int => reader.samples::<i32>().collect::<Result<_, _>>(),
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(|v| (v * i16::MAX as f32) as i32))
            .collect::<Result<_, _>>(),
    }
    .map_err(|e| StoreError::Audio(e.to_string()))?;
    let channels = spec.channels as usize;
    let rate = spec.sample_rate as i64;
    let total = (samples.len() / channels) as i64;
    let out_spec = hound::WavSpec {
        channels: spec.channels,
        sample_rate: spec.sample_rate,
        bits_per_sample: if spec.sample_format == hound::SampleFormat::Int { spec.bits_per_sample } else { 16 },
        sample_format: hound::SampleFormat::Int,
    };
    for i in 0..n {
        let centre = frame_timestamp_ms(i, fps) as i64 * rate / 1000;
        let start = centre - rate / 2;
        let path = dir.join(audio_clip_name(i));
        let mut w = hound::WavWriter::create(&path, out_spec).map_err(|e| StoreError::Audio(e.to_string()))?;
        for t in start..start + rate {
            for c in 0..channels {
                let s = if (0..total).contains(&t) { samples[t as usize * channels + c] } else { 0 };
                w.write_sample(s).map_err(|e| StoreError::Audio(e.to_string()))?;
            }
        }
        w.finalize().map_err(|e| StoreError::Audio(e.to_string()))?;
    }
    Ok(())
}

/// An ingested project loaded from disk.
#[derive(Debug, Clone)]
pub struct LoadedProject {
    pub dir: PathBuf,
    pub manifest: ProjectManifest,
    pub project: Project,
}

impl LoadedProject {
    pub fn open(dir: &Path) -> Result<Self> {
        let manifest_path = dir.join(PROJECT_FILE);
        if !manifest_path.exists() {
            return Err(StoreError::NotIngested(dir.to_path_buf()));
        }
        let manifest: ProjectManifest = read_json(&manifest_path)?;
        let mut issues = Vec::new();
        let frames = load_frames(dir, manifest.n_frames, manifest.fps, manifest.dims, &manifest.frames, &mut issues);
        if !issues.is_empty() {
            return Err(StoreError::Validation(issues));
        }
        let project = Project { dims: manifest.dims, fps: manifest.fps, policy: manifest.policy, frames };
        Ok(Self { dir: dir.to_path_buf(), manifest, project })
    }

    /// Reference annotations from `ground_truth.json`, if present.
    pub fn ground_truth(&self) -> Result<Option<Vec<ExportFrame>>> {
        let path = self.dir.join(GROUND_TRUTH_FILE);
        if !path.exists() {
            return Ok(None);
        }
        read_json(&path).map(Some)
    }

    pub fn sessions_dir(&self) -> PathBuf {
        self.dir.join(SESSIONS_DIR)
    }
}

/// Ingested projects directly below `data_dir`, or `data_dir` itself if it is one.
pub fn discover_projects(data_dir: &Path) -> Result<Vec<PathBuf>> {
    if data_dir.join(PROJECT_FILE).exists() {
        return Ok(vec![data_dir.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = fs::read_dir(data_dir)
        .map_err(io_err(data_dir))?
        .flatten()
        .map(|e| e.path())
        .filter(|p| p.join(PROJECT_FILE).exists())
        .collect();
    out.sort();
    Ok(out)
}

/// Write both sidecars for `frames`.
pub fn write_sidecars(dir: &Path, frames: &[FrameRecord]) -> Result<()> {
    let det = DetectorSidecar {
        frames: frames
            .iter()
            .map(|f| DetectionFrame { index: f.index, objects: f.detections.clone() })
            .collect(),
    };
    let tags = TaggerSidecar {
        frames: frames.iter().map(|f| TagFrame { index: f.index, tags: f.audio_tags.clone() }).collect(),
    };
    write_json(&dir.join(DETECTIONS_SIDECAR), &det)?;
    write_json(&dir.join(TAGS_SIDECAR), &tags)
}

// ---------------------------------------------------------------------------
// Export

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportItem {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub sound_label: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportFrame {
    pub frame_index: usize,
    pub items: Vec<ExportItem>,
}

impl ExportFrame {
    pub fn boxes(&self) -> Vec<BoundingBox> {
        self.items.iter().map(|i| i.bbox).collect()
    }
}

fn canonical_items(mut items: Vec<ExportItem>) -> Vec<ExportItem> {
    items.sort_by(|a, b| {
        let ka = [a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h];
        let kb = [b.bbox.x, b.bbox.y, b.bbox.w, b.bbox.h];
        ka.iter()
            .zip(kb.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.sound_label.cmp(&b.sound_label))
    });
    items
}

/// Resolve one annotation into export form, items in canonical order.
pub fn export_frame(annotation: Option<&SoundingAnnotation>, frame: &FrameRecord) -> ExportFrame {
    let items = annotation
        .map(|a| {
            a.resolved(frame)
                .map(|(bbox, label, provenance)| ExportItem { bbox, sound_label: label.to_string(), provenance })
                .collect()
        })
        .unwrap_or_default();
    ExportFrame { frame_index: frame.index, items: canonical_items(items) }
}

/// Every frame of the session; frames without an annotation export `items: []`.
pub fn export(project: &Project, state: &SessionState) -> Vec<ExportFrame> {
    project
        .frames
        .iter()
        .map(|f| export_frame(state.annotations.get(f.index).and_then(Option::as_ref), f))
        .collect()
}

/// Canonicalise a hand-made export list (sorted frames and items).
pub fn normalize_export(mut frames: Vec<ExportFrame>) -> Vec<ExportFrame> {
    frames.sort_by_key(|f| f.frame_index);
    frames
        .into_iter()
        .map(|f| ExportFrame { frame_index: f.frame_index, items: canonical_items(f.items) })
        .collect()
}

pub fn export_json(frames: &[ExportFrame]) -> String {
    let mut s = serde_json::to_string_pretty(frames).expect("export serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// Operation log

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Human,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Annotate,
    Modify,
    Populate,
    Skip,
    Navigate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seq: u64,
    pub timestamp_ms: u64,
    pub actor: Actor,
    pub op: OpKind,
    pub payload: serde_json::Value,
    pub checksum: String,
}

impl LogRecord {
    pub fn new(seq: u64, timestamp_ms: u64, actor: Actor, op: OpKind, payload: serde_json::Value) -> Self {
        let mut r = Self { seq, timestamp_ms, actor, op, payload, checksum: String::new() };
        r.checksum = r.compute_checksum();
        r
    }

    pub fn compute_checksum(&self) -> String {
        let body = serde_json::json!({
            "seq": self.seq,
            "timestamp_ms": self.timestamp_ms,
            "actor": self.actor,
            "op": self.op,
            "payload": self.payload,
        });
        let digest = Sha256::digest(body.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

/// Parse a JSON-lines log, verifying sequence numbers and checksums.
pub fn parse_log(text: &str) -> Result<Vec<LogRecord>> {
    let mut out: Vec<LogRecord> = Vec::new();
    let last = |out: &Vec<LogRecord>| out.last().map_or(0, |r| r.seq);
    for (lineno, line) in text.split_inclusive('\n').enumerate() {
        if !line.ends_with('\n') {
            return Err(StoreError::CorruptLog {
                last_valid_seq: last(&out),
                reason: format!("line {} is truncated", lineno + 1),
            });
        }
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let record: LogRecord = serde_json::from_str(line).map_err(|e| StoreError::CorruptLog {
            last_valid_seq: last(&out),
            reason: format!("line {}: {e}", lineno + 1),
        })?;
        if record.checksum != record.compute_checksum() {
            return Err(StoreError::CorruptLog {
                last_valid_seq: last(&out),
                reason: format!("checksum mismatch on seq {}", record.seq),
            });
        }
        if record.seq != last(&out) + 1 {
            return Err(StoreError::CorruptLog {
                last_valid_seq: last(&out),
                reason: format!("seq {} does not follow {}", record.seq, last(&out)),
            });
        }
        out.push(record);
    }
    Ok(out)
}

/// Exclusive writer handle for one session directory; the lock file is removed on drop.
#[derive(Debug)]
pub struct SessionWriter {
    dir: PathBuf,
    log: File,
}

impl SessionWriter {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let lock = dir.join("lock");
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => return Err(StoreError::Locked(lock)),
            Err(e) => return Err(StoreError::Io { path: lock, source: e }),
        }
        let log_path = dir.join("log.jsonl");
        let log = OpenOptions::new().create(true).append(true).open(&log_path).map_err(io_err(&log_path))?;
        Ok(Self { dir: dir.to_path_buf(), log })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn append(&mut self, record: &LogRecord) -> Result<()> {
        let mut line = serde_json::to_string(record).expect("record serializes");
        line.push('\n');
        let path = self.dir.join("log.jsonl");
        self.log.write_all(line.as_bytes()).map_err(io_err(&path))?;
        self.log.flush().map_err(io_err(&path))
    }
}

impl Drop for SessionWriter {
    fn drop(&mut self) {
        let _ = fs::remove_file(self.dir.join("lock"));
    }
}

pub fn read_log(dir: &Path) -> Result<Vec<LogRecord>> {
    let path = dir.join("log.jsonl");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    parse_log(&text)
}

/// Ids of sessions stored under a project.
pub fn list_sessions(project_dir: &Path) -> Vec<String> {
    let dir = project_dir.join(SESSIONS_DIR);
    let mut ids: BTreeSet<String> = BTreeSet::new();
    if let Ok(entries) = fs::read_dir(dir) {
        for e in entries.flatten() {
            if e.path().join("session.json").exists() {
                ids.insert(e.file_name().to_string_lossy().into_owned());
            }
        }
    }
    ids.into_iter().collect()
}

/// Reference annotations converted to per-frame box lists.
pub fn truth_boxes(truth: &[ExportFrame], n_frames: usize) -> Vec<Vec<BoundingBox>> {
    let mut out = vec![Vec::new(); n_frames];
    for f in truth {
        if f.frame_index < n_frames {
            out[f.frame_index] = f.boxes();
        }
    }
    out
}

impl From<ModelError> for StoreError {
    fn from(e: ModelError) -> Self {
        StoreError::Validation(vec![e.to_string()])
    }
}
