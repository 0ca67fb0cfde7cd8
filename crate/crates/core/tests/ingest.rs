mod common;

use avloop::store::{ingest, read_json, write_json, DetectorSidecar, LoadedProject, StoreError, AUDIO_TRACK, DETECTIONS_SIDECAR};
use avloop::synth::{synth, SynthConfig};
use common::{bb, det, tag, write_project};

fn issues(e: StoreError) -> Vec<String> {
    match e {
        StoreError::Validation(v) => v,
        other => panic!("expected validation error, got {other}"),
    }
}

#[test]
fn synthetic_project_ingests() {
    let dir = tempfile::tempdir().unwrap();
    synth(&SynthConfig { n_frames: 80, n_changes: 1, ..Default::default() }, dir.path()).unwrap();
    let m = ingest(dir.path()).unwrap();
    assert_eq!(m.n_frames, 80);
    assert_eq!(m.fps, 8);
    let loaded = LoadedProject::open(dir.path()).unwrap();
    assert_eq!(loaded.project.frames.len(), 80);
    assert_eq!(loaded.project.frames[8].timestamp_ms, 1000);
    assert_eq!(loaded.ground_truth().unwrap().unwrap().len(), 80);
}

#[test]
fn missing_sidecar_entry_names_the_frame() {
    let dir = tempfile::tempdir().unwrap();
    synth(&SynthConfig { n_frames: 80, ..Default::default() }, dir.path()).unwrap();
    let path = dir.path().join(DETECTIONS_SIDECAR);
    let mut side: DetectorSidecar = read_json(&path).unwrap();
    side.frames.retain(|f| f.index != 79);
    write_json(&path, &side).unwrap();
    let v = issues(ingest(dir.path()).unwrap_err());
    assert_eq!(v, vec!["detections.json: no entry for frame 79".to_string()]);
}

#[test]
fn fps_defaults_to_eight() {
    let dir = tempfile::tempdir().unwrap();
    write_project(dir.path(), 32, 24, &vec![(vec![], vec![]); 3]);
    let m = ingest(dir.path()).unwrap();
    assert_eq!(m.fps, 8);
    assert_eq!(m.dims.width, 32);
    assert!(dir.path().join("project.json").exists());
}

#[test]
fn every_problem_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let frames = vec![
        (vec![det(0, bb(1.0, 1.0, 5.0, 5.0), "dog"), det(0, bb(9.0, 1.0, 5.0, 5.0), "dog")], vec![tag("bark", 0.9)]),
        (vec![], vec![tag("bark", 1.7)]),
        (vec![], vec![]),
        (vec![], vec![]),
    ];
    write_project(dir.path(), 32, 24, &frames);
    std::fs::remove_file(dir.path().join("frames/000002.png")).unwrap();
    std::fs::remove_file(dir.path().join("audio/clip_000001.wav")).unwrap();
    let v = issues(ingest(dir.path()).unwrap_err());
    let joined = v.join("\n");
    assert!(joined.contains("frame 2 is missing"), "{joined}");
    assert!(joined.contains("missing audio clip audio/clip_000001.wav"), "{joined}");
    assert!(joined.contains("duplicate detection id 0"), "{joined}");
    assert!(joined.contains("confidence 1.7"), "{joined}");
    assert!(!dir.path().join("project.json").exists());
}

#[test]
fn malformed_sidecar_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    write_project(dir.path(), 32, 24, &vec![(vec![], vec![]); 2]);
    std::fs::write(dir.path().join("sidecar/audiotags.json"), "{\"frames\": [").unwrap();
    let v = issues(ingest(dir.path()).unwrap_err());
    assert!(v.iter().any(|m| m.contains("audiotags.json") && m.contains("malformed JSON")), "{v:?}");
}

#[test]
fn stray_and_duplicate_sidecar_entries() {
    let dir = tempfile::tempdir().unwrap();
    write_project(dir.path(), 32, 24, &vec![(vec![], vec![]); 2]);
    let path = dir.path().join(DETECTIONS_SIDECAR);
    let mut side: DetectorSidecar = read_json(&path).unwrap();
    side.frames.push(side.frames[0].clone());
    let mut stray = side.frames[0].clone();
    stray.index = 5;
    side.frames.push(stray);
    write_json(&path, &side).unwrap();
    let v = issues(ingest(dir.path()).unwrap_err());
    assert!(v.contains(&"detections.json: duplicate entry for frame 0".to_string()), "{v:?}");
    assert!(v.contains(&"detections.json: entry for frame 5 but the project has 2 frames".to_string()), "{v:?}");
}

#[test]
fn boxes_are_clamped_to_the_frame() {
    let dir = tempfile::tempdir().unwrap();
    write_project(dir.path(), 32, 24, &[(vec![det(0, bb(28.0, -2.0, 10.0, 10.0), "dog")], vec![])]);
    ingest(dir.path()).unwrap();
    let p = LoadedProject::open(dir.path()).unwrap();
    assert_eq!(p.project.frames[0].detections[0].bbox, bb(28.0, 0.0, 4.0, 8.0));
}

#[test]
fn clips_are_cut_from_a_track() {
    let dir = tempfile::tempdir().unwrap();
    write_project(dir.path(), 32, 24, &vec![(vec![], vec![]); 4]);
    for i in 0..4 {
        std::fs::remove_file(dir.path().join(format!("audio/clip_{i:06}.wav"))).unwrap();
    }
    // Half a second of a ramp at 8 kHz: sample value = sample index.
    let spec = hound::WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
    let mut w = hound::WavWriter::create(dir.path().join(AUDIO_TRACK), spec).unwrap();
    for t in 0..4000i32 {
        w.write_sample(t as i16).unwrap();
    }
    w.finalize().unwrap();
    ingest(dir.path()).unwrap();
    // Frame 1 is at 125 ms, so its clip spans -375 ms .. 625 ms.
    let r = hound::WavReader::open(dir.path().join("audio/clip_000001.wav")).unwrap();
    let s: Vec<i16> = r.into_samples::<i16>().map(Result::unwrap).collect();
    assert_eq!(s.len(), 8000);
    assert_eq!(s[2999], 0);
    assert_eq!(s[3000], 0);
    assert_eq!(s[3001], 1);
    assert_eq!(s[6999], 3999);
    assert_eq!(s[7000], 0);
}

#[test]
fn open_requires_ingest() {
    let dir = tempfile::tempdir().unwrap();
    write_project(dir.path(), 32, 24, &vec![(vec![], vec![]); 2]);
    assert!(matches!(LoadedProject::open(dir.path()), Err(StoreError::NotIngested(_))));
}
