//! Seeded synthetic projects: flat-colour frames with drifting rectangles,
//! piecewise-constant sounding objects, matching sidecars and ground truth.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::path::Path;

use image::{Rgb, RgbImage};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    frame_timestamp_ms, AudioTag, BoundingBox, DetectedObject, DetectionId, FrameDims, FrameRecord, MatchPolicy,
    Project, Provenance, DEFAULT_FPS,
};
use crate::store::{
    audio_clip_name, normalize_export, write_json, write_sidecars, ExportFrame, ExportItem, ProjectMeta,
    StoreError, GROUND_TRUTH_FILE, META_FILE,
};

/// Object classes and the sound each one makes.
pub const CLASSES: [(&str, &str); 8] = [
    ("dog", "bark"),
    ("car", "engine"),
    ("person", "speech"),
    ("violin", "violin"),
    ("train", "horn"),
    ("bird", "chirp"),
    ("cat", "meow"),
    ("drum", "drumroll"),
];

/// Ids given to spurious detections start here.
pub const SPURIOUS_ID_BASE: u32 = 1000;

const AUDIO_RATE: u32 = 8000;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("writing {path}: {reason}")]
    Write { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_frames: usize,
    /// Number of change points drawn at random; ignored when `change_points` is set.
    pub n_changes: usize,
    pub change_points: Option<Vec<usize>>,
    pub objects_per_frame: usize,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub fps: u32,
    /// Chance that a true object is absent from a frame's detections.
    pub miss_rate: f64,
    /// Chance per frame of one extra detection with no real object behind it.
    pub spurious_rate: f64,
    /// Horizontal motion per frame, pixels.
    pub drift_px: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_frames: 80,
            n_changes: 1,
            change_points: None,
            objects_per_frame: 2,
            seed: 0,
            width: 320,
            height: 240,
            fps: DEFAULT_FPS,
            miss_rate: 0.0,
            spurious_rate: 0.0,
            drift_px: 1.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Invalid(m));
        if self.n_frames == 0 {
            return bad("n_frames must be positive".into());
        }
        if self.objects_per_frame == 0 || self.objects_per_frame > CLASSES.len() {
            return bad(format!("objects_per_frame must be in 1..={}", CLASSES.len()));
        }
        let n_changes = self.change_points.as_ref().map_or(self.n_changes, Vec::len);
        if n_changes >= self.n_frames {
            return bad(format!("{n_changes} change points do not fit in {} frames", self.n_frames));
        }
        if let Some(cps) = &self.change_points {
            if let Some(c) = cps.iter().find(|&&c| c == 0 || c >= self.n_frames) {
                return bad(format!("change point {c} must be in 1..{}", self.n_frames));
            }
        }
        if !(0.0..=1.0).contains(&self.miss_rate) || !(0.0..=1.0).contains(&self.spurious_rate) {
            return bad("noise rates must be in [0, 1]".into());
        }
        let lane = self.height / self.objects_per_frame as u32;
        if self.width < 80 || lane < 60 {
            return bad(format!("{}x{} is too small for {} objects", self.width, self.height, self.objects_per_frame));
        }
        if self.fps == 0 {
            return bad("fps must be positive".into());
        }
        Ok(())
    }
}

/// One generated clip held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthClip {
    pub project: Project,
    pub ground_truth: Vec<ExportFrame>,
    pub change_points: Vec<usize>,
    /// Index into `CLASSES` of each object.
    pub object_classes: Vec<usize>,
    /// True box of every object in every frame.
    pub true_boxes: Vec<Vec<BoundingBox>>,
    /// Sounding object per frame; `None` is silence.
    pub sounding: Vec<Option<usize>>,
}

impl SynthClip {
    /// Number of true object boxes absent from the detections.
    pub fn missed_boxes(&self) -> usize {
        self.project
            .frames
            .iter()
            .map(|f| {
                let ids: BTreeSet<u32> = f.detections.iter().map(|d| d.id.0).collect();
                (0..self.object_classes.len() as u32).filter(|i| !ids.contains(i)).count()
            })
            .sum()
    }
}

struct Mover {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    dir: f64,
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthClip, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_frames;
    let k = cfg.objects_per_frame;

    let mut change_points: Vec<usize> = match &cfg.change_points {
        Some(cps) => cps.clone(),
        None => sample(&mut rng, n - 1, cfg.n_changes).into_iter().map(|c| c + 1).collect(),
    };
    change_points.sort_unstable();
    change_points.dedup();

    let object_classes: Vec<usize> = sample(&mut rng, CLASSES.len(), k).into_vec();
    let lane_h = f64::from(cfg.height) / k as f64;
    let mut movers: Vec<Mover> = (0..k)
        .map(|j| {
            let w = rng.random_range(32.0..56.0f64).round();
            let h = rng.random_range(32.0..56.0f64).min(lane_h - 8.0).round();
            Mover {
                x: rng.random_range(0.0..f64::from(cfg.width) - w).round(),
                y: (j as f64 * lane_h + (lane_h - h) / 2.0).round(),
                w,
                h,
                dir: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            }
        })
        .collect();

    // Which object sounds in each segment.
    let mut seg_sounding: Vec<Option<usize>> = Vec::with_capacity(change_points.len() + 1);
    for s in 0..=change_points.len() {
        let pick = if k == 1 {
            (s % 2 == 0).then_some(0)
        } else {
            let prev = seg_sounding.last().copied().flatten();
            let mut o = rng.random_range(0..k);
            while Some(o) == prev {
                o = rng.random_range(0..k);
            }
            Some(o)
        };
        seg_sounding.push(pick);
    }

    let mut frames = Vec::with_capacity(n);
    let mut true_boxes = Vec::with_capacity(n);
    let mut sounding = Vec::with_capacity(n);
    let mut ground_truth = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            for m in &mut movers {
                let nx = m.x + m.dir * cfg.drift_px;
                if nx < 0.0 || nx + m.w > f64::from(cfg.width) {
                    m.dir = -m.dir;
                }
                m.x += m.dir * cfg.drift_px;
            }
        }
        let boxes: Vec<BoundingBox> = movers.iter().map(|m| BoundingBox { x: m.x, y: m.y, w: m.w, h: m.h }).collect();
        let seg = change_points.iter().filter(|&&c| c <= i).count();
        let who = seg_sounding[seg];

        let mut detections = Vec::with_capacity(boxes.len() + 1);
        for (j, b) in boxes.iter().enumerate() {
            if rng.random_bool(cfg.miss_rate) {
                continue;
            }
            detections.push(DetectedObject {
                id: DetectionId(j as u32),
                bbox: *b,
                class_label: CLASSES[object_classes[j]].0.into(),
                confidence: round3(rng.random_range(0.7..0.99)),
            });
        }
        if rng.random_bool(cfg.spurious_rate) {
            let w = rng.random_range(20.0..40.0f64).round();
            let h = rng.random_range(20.0..40.0f64).round();
            detections.push(DetectedObject {
                id: DetectionId(SPURIOUS_ID_BASE + i as u32),
                bbox: BoundingBox {
                    x: rng.random_range(0.0..f64::from(cfg.width) - w).round(),
                    y: rng.random_range(0.0..f64::from(cfg.height) - h).round(),
                    w,
                    h,
                },
                class_label: CLASSES[rng.random_range(0..CLASSES.len())].0.into(),
                confidence: round3(rng.random_range(0.3..0.6)),
            });
        }

        let audio_tags = match who {
            Some(o) => {
                let sound = CLASSES[object_classes[o]].1;
                let mut tags = vec![AudioTag { label: sound.into(), confidence: round3(rng.random_range(0.75..0.98)) }];
                let other = CLASSES.iter().map(|c| c.1).find(|s| *s != sound).expect("several sounds");
                tags.push(AudioTag { label: other.into(), confidence: round3(rng.random_range(0.05..0.3)) });
                tags
            }
            None => Vec::new(),
        };

        let items = who
            .map(|o| {
                vec![ExportItem {
                    bbox: boxes[o],
                    sound_label: CLASSES[object_classes[o]].1.into(),
                    provenance: Provenance::Human,
                }]
            })
            .unwrap_or_default();
        ground_truth.push(ExportFrame { frame_index: i, items });
        frames.push(FrameRecord {
            index: i,
            timestamp_ms: frame_timestamp_ms(i, cfg.fps),
            image_ref: format!("frames/{i:06}.png"),
            detections,
            audio_tags,
        });
        true_boxes.push(boxes);
        sounding.push(who);
    }

    Ok(SynthClip {
        project: Project {
            dims: FrameDims { width: cfg.width, height: cfg.height },
            fps: cfg.fps,
            policy: MatchPolicy::default(),
            frames,
        },
        ground_truth: normalize_export(ground_truth),
        change_points,
        object_classes,
        true_boxes,
        sounding,
    })
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn class_colour(class: usize) -> Rgb<u8> {
    const PALETTE: [[u8; 3]; 8] = [
        [200, 120, 40],
        [40, 90, 200],
        [220, 180, 150],
        [140, 40, 40],
        [60, 160, 60],
        [230, 220, 50],
        [120, 120, 120],
        [160, 60, 180],
    ];
    Rgb(PALETTE[class % PALETTE.len()])
}

fn write_err(path: &Path, e: impl std::fmt::Display) -> SynthError {
    SynthError::Write { path: path.display().to_string(), reason: e.to_string() }
}

/// Write `clip` as a project directory ready for ingest.
pub fn write_project(clip: &SynthClip, dir: &Path, seed: u64) -> Result<(), SynthError> {
    let p = &clip.project;
    for sub in ["frames", "audio", "sidecar"] {
        std::fs::create_dir_all(dir.join(sub)).map_err(|e| write_err(&dir.join(sub), e))?;
    }
    for (i, f) in p.frames.iter().enumerate() {
        let mut img = RgbImage::from_pixel(p.dims.width, p.dims.height, Rgb([235, 235, 225]));
        for (j, b) in clip.true_boxes[i].iter().enumerate() {
            let colour = class_colour(clip.object_classes[j]);
            let (x0, y0) = (b.x.max(0.0) as u32, b.y.max(0.0) as u32);
            let x1 = (b.right() as u32).min(p.dims.width);
            let y1 = (b.bottom() as u32).min(p.dims.height);
            for y in y0..y1 {
                for x in x0..x1 {
                    img.put_pixel(x, y, colour);
                }
            }
        }
        let path = dir.join(&f.image_ref);
        img.save(&path).map_err(|e| write_err(&path, e))?;

        let path = dir.join(audio_clip_name(i));
        let tone = clip.sounding[i].map(|o| 220.0 * (1.0 + clip.object_classes[o] as f64 / 2.0));
        write_clip(&path, tone).map_err(|e| write_err(&path, e))?;
    }
    write_sidecars(dir, &p.frames)?;
    write_json(&dir.join(GROUND_TRUTH_FILE), &clip.ground_truth)?;
    write_json(
        &dir.join(META_FILE),
        &ProjectMeta {
            id: dir.file_name().map(|s| s.to_string_lossy().into_owned()),
            fps: Some(p.fps),
            source: Some(format!("synth seed {seed}")),
            policy: None,
        },
    )?;
    Ok(())
}

/// One second of a sine tone, or silence.
fn write_clip(path: &Path, tone_hz: Option<f64>) -> Result<(), hound::Error> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: AUDIO_RATE,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec)?;
    for t in 0..AUDIO_RATE {
        let s = tone_hz.map_or(0.0, |f| (TAU * f * f64::from(t) / f64::from(AUDIO_RATE)).sin() * 8000.0);
        w.write_sample(s as i16)?;
    }
    w.finalize()
}

/// Generate and write a project in one step.
pub fn synth(cfg: &SynthConfig, dir: &Path) -> Result<SynthClip, SynthError> {
    let clip = generate(cfg)?;
    write_project(&clip, dir, cfg.seed)?;
    Ok(clip)
}
