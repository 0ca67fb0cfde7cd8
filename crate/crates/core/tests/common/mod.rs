#![allow(dead_code)]

use std::path::Path;

use avloop::model::{AudioTag, BoundingBox, DetectedObject, DetectionId};
use avloop::store::{audio_clip_name, write_json, DetectionFrame, DetectorSidecar, TagFrame, TaggerSidecar};

pub fn bb(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
    BoundingBox { x, y, w, h }
}

pub fn det(id: u32, b: BoundingBox, label: &str) -> DetectedObject {
    DetectedObject { id: DetectionId(id), bbox: b, class_label: label.into(), confidence: 0.9 }
}

pub fn tag(label: &str, confidence: f64) -> AudioTag {
    AudioTag { label: label.into(), confidence }
}

/// Write a minimal project by hand: blank PNG frames, silent clips, sidecars.
pub fn write_project(dir: &Path, width: u32, height: u32, frames: &[(Vec<DetectedObject>, Vec<AudioTag>)]) {
    std::fs::create_dir_all(dir.join("frames")).unwrap();
    std::fs::create_dir_all(dir.join("audio")).unwrap();
    for i in 0..frames.len() {
        image::RgbImage::new(width, height).save(dir.join(format!("frames/{i:06}.png"))).unwrap();
        write_silence(&dir.join(audio_clip_name(i)), 800);
    }
    write_json(
        &dir.join("sidecar/detections.json"),
        &DetectorSidecar {
            frames: frames.iter().enumerate().map(|(i, f)| DetectionFrame { index: i, objects: f.0.clone() }).collect(),
        },
    )
    .unwrap();
    write_json(
        &dir.join("sidecar/audiotags.json"),
        &TaggerSidecar { frames: frames.iter().enumerate().map(|(i, f)| TagFrame { index: i, tags: f.1.clone() }).collect() },
    )
    .unwrap();
}

pub fn write_silence(path: &Path, samples: u32) {
    let spec = hound::WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    for _ in 0..samples {
        w.write_sample(0i16).unwrap();
    }
    w.finalize().unwrap();
}

/// Brute-force consensus IoU: visit every pixel centre of the frame.
pub fn raster_ciou(
    width: u32,
    height: u32,
    experts: &[Vec<BoundingBox>],
    consensus: u32,
    participant: &[BoundingBox],
) -> f64 {
    let covers = |b: &BoundingBox, px: u32, py: u32| {
        let (cx, cy) = (f64::from(px) + 0.5, f64::from(py) + 0.5);
        b.x <= cx && cx < b.x + b.w && b.y <= cy && cy < b.y + b.h
    };
    let (mut sum_g, mut hit, mut outside, mut any_a) = (0.0, 0.0, 0u64, false);
    for py in 0..height {
        for px in 0..width {
            let votes = experts.iter().filter(|e| e.iter().any(|b| covers(b, px, py))).count();
            let g = (votes as f64 / f64::from(consensus)).min(1.0);
            let in_a = participant.iter().any(|b| covers(b, px, py));
            sum_g += g;
            if in_a {
                any_a = true;
                hit += g;
                if g == 0.0 {
                    outside += 1;
                }
            }
        }
    }
    if sum_g == 0.0 {
        return if any_a { 0.0 } else { 1.0 };
    }
    hit / (sum_g + outside as f64)
}
