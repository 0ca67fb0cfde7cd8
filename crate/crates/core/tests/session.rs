mod common;

use std::sync::Arc;

use avloop::model::{AnnotationItem, DetectionId, SoundingAnnotation, Target};
use avloop::scheduler::{FrameStatus, NextStep, SessionMode};
use avloop::session::{session_dir, Session, SessionError};
use avloop::store::{export_json, ingest, read_log, LoadedProject, StoreError};
use common::{bb, det, tag, write_project};

const GOLDEN: &str = include_str!("data/golden_export.json");

fn three_frame_project(dir: &std::path::Path) -> LoadedProject {
    let frames: Vec<_> = (0..3)
        .map(|i| {
            let x = 8.0 + f64::from(i);
            (
                vec![det(0, bb(x, 8.0, 24.0, 20.0), "dog"), det(1, bb(40.0, 30.0, 16.0, 12.0), "car")],
                vec![tag("bark", 0.91), tag("speech", 0.77), tag("engine", 0.2)],
            )
        })
        .collect();
    write_project(dir, 64, 48, &frames);
    ingest(dir).unwrap();
    LoadedProject::open(dir).unwrap()
}

fn dog_and_speaker(frame: usize) -> SoundingAnnotation {
    SoundingAnnotation::new(
        frame,
        vec![
            AnnotationItem::human(Target::DetectionId(DetectionId(0)), "bark"),
            AnnotationItem::human(Target::CustomBox(bb(2.0, 30.0, 10.0, 14.0)), "speech"),
        ],
    )
}

#[test]
fn three_frame_export_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let p = three_frame_project(dir.path());
    let mut s = Session::create(&p, Arc::new(p.project.clone()), SessionMode::Guided).unwrap();
    assert_eq!(s.next_step(), NextStep::AnnotateFrame(0));
    let d = s.submit(0, dog_and_speaker(0)).unwrap();
    assert_eq!(d.next, NextStep::AnnotateFrame(2));
    let d = s.submit(2, dog_and_speaker(2)).unwrap();
    assert_eq!(d.next, NextStep::Done);
    assert_eq!(d.populated, vec![(0, 2)]);
    assert_eq!(s.state.status, vec![FrameStatus::Human, FrameStatus::Auto, FrameStatus::Human]);
    assert_eq!(export_json(&s.export()), GOLDEN);
}

#[test]
fn save_and_reopen_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = three_frame_project(dir.path());
    let shared = Arc::new(p.project.clone());
    let mut s = Session::create(&p, shared.clone(), SessionMode::Guided).unwrap();
    s.submit(0, dog_and_speaker(0)).unwrap();
    s.preempt().unwrap();
    let id = s.id().to_string();
    let (state, hash, log) = (s.state.clone(), s.state_hash(), s.log.clone());
    drop(s);

    let mut back = Session::open(&p, shared.clone(), &id, true).unwrap();
    assert_eq!(back.state, state);
    assert_eq!(back.state_hash(), hash);
    assert_eq!(back.log, log);
    assert_eq!(back.revision, 2);
    // Confirming the held proposal unchanged marks the frame auto.
    let proposal = back.state.proposal.clone().unwrap();
    back.submit(1, proposal).unwrap();
    assert_eq!(back.state.status[1], FrameStatus::Auto);
    drop(back);
    assert_eq!(read_log(&session_dir(&p, &id)).unwrap().len(), log.len() + 2);
}

#[test]
fn second_writer_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let p = three_frame_project(dir.path());
    let shared = Arc::new(p.project.clone());
    let s = Session::create(&p, shared.clone(), SessionMode::Guided).unwrap();
    let id = s.id().to_string();
    let err = Session::open(&p, shared.clone(), &id, true).unwrap_err();
    assert!(matches!(err, SessionError::Store(StoreError::Locked(_))), "{err}");
    // Readers are not blocked, and the lock goes away with the writer.
    Session::open(&p, shared.clone(), &id, false).unwrap();
    drop(s);
    Session::open(&p, shared, &id, true).unwrap();
}

#[test]
fn truncated_log_reports_last_valid_seq() {
    let dir = tempfile::tempdir().unwrap();
    let p = three_frame_project(dir.path());
    let shared = Arc::new(p.project.clone());
    let mut s = Session::create(&p, shared.clone(), SessionMode::Guided).unwrap();
    s.submit(0, dog_and_speaker(0)).unwrap();
    let id = s.id().to_string();
    let n = s.log.len() as u64;
    drop(s);
    let log = session_dir(&p, &id).join("log.jsonl");
    let text = std::fs::read_to_string(&log).unwrap();
    std::fs::write(&log, &text[..text.len() - 20]).unwrap();
    match Session::open(&p, shared, &id, false).unwrap_err() {
        SessionError::Store(StoreError::CorruptLog { last_valid_seq, .. }) => assert_eq!(last_valid_seq, n - 1),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn tampered_system_record_is_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let p = three_frame_project(dir.path());
    let shared = Arc::new(p.project.clone());
    let mut s = Session::create(&p, shared.clone(), SessionMode::Guided).unwrap();
    s.submit(0, dog_and_speaker(0)).unwrap();
    let id = s.id().to_string();
    let mut records = s.log.clone();
    drop(s);
    // Rewrite the navigation record with a valid checksum but a different target.
    let last = records.len() - 1;
    let mut r = records[last].clone();
    r.payload = serde_json::json!({"next": {"kind": "annotate_frame", "frame": 1}});
    records[last] = avloop::store::LogRecord::new(r.seq, r.timestamp_ms, r.actor, r.op, r.payload);
    let text: String = records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
    std::fs::write(session_dir(&p, &id).join("log.jsonl"), text).unwrap();
    let err = Session::open(&p, shared, &id, false).unwrap_err();
    assert!(matches!(err, SessionError::Store(StoreError::ReplayDiverged { .. })), "{err}");
}

#[test]
fn unknown_session() {
    let dir = tempfile::tempdir().unwrap();
    let p = three_frame_project(dir.path());
    let err = Session::open(&p, Arc::new(p.project.clone()), "nope", false).unwrap_err();
    assert!(matches!(err, SessionError::Store(StoreError::UnknownSession(_))));
}
