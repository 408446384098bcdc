use std::fs;
use std::path::Path;

use dfam::error::Category;
use dfam::manifest::{self, SubjectManifest, MANIFEST_FILE};
use dfam::model_file;
use dfam::stream_csv;
use dfam::synth::{self, SynthConfig};
use dfam_core::dfam::{self as core_dfam, DfamConfig, SignatureBuilder};
use dfam_core::signal::{Sample, StreamKind, TimeSeries};
use dfam_core::ActivityLabel;
use proptest::prelude::*;

fn small_corpus(dir: &Path) {
    let cfg = SynthConfig {
        subjects: 2,
        duration_s: 10.0,
        activities: synth::activity_names(3).unwrap(),
        ..SynthConfig::default()
    };
    synth::write_corpus(dir, &cfg).unwrap();
}

fn edit_manifest(dir: &Path, f: impl FnOnce(&mut SubjectManifest)) {
    let path = dir.join("s01").join(MANIFEST_FILE);
    let mut m = manifest::read_manifest(&path).unwrap();
    f(&mut m);
    manifest::write_manifest(&path, &m).unwrap();
}

fn load_category(dir: &Path) -> Category {
    manifest::load_dataset(dir).unwrap_err().category()
}

#[test]
fn manifest_rejects_missing_stream() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path());
    edit_manifest(tmp.path(), |m| {
        m.recordings[0].streams.remove("watch_gyro");
    });
    assert_eq!(load_category(tmp.path()), Category::Manifest);
}

#[test]
fn manifest_rejects_unknown_placement() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path());
    edit_manifest(tmp.path(), |m| m.placement = "XX".into());
    assert_eq!(load_category(tmp.path()), Category::Manifest);
}

#[test]
fn manifest_rejects_mismatched_rates() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path());
    edit_manifest(tmp.path(), |m| m.sampling_hz = 100.0);
    assert_eq!(load_category(tmp.path()), Category::Manifest);
}

#[test]
fn manifest_rejects_stream_file_that_does_not_exist() {
    let tmp = tempfile::tempdir().unwrap();
    small_corpus(tmp.path());
    fs::remove_file(tmp.path().join("s02").join("walking_phone_gyro.csv")).unwrap();
    assert_eq!(load_category(tmp.path()), Category::Manifest);
}

#[test]
fn stream_csv_rejects_wrong_header() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("s.csv");
    fs::write(&p, "time,x,y,z\n0,1,2,3\n").unwrap();
    let e = stream_csv::read_stream(&p, StreamKind::PHONE_ACCEL, 50.0).unwrap_err();
    assert_eq!(e.category(), Category::Format);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stream_csv_round_trips(values in prop::collection::vec(prop::array::uniform3(-1e6f64..1e6), 1..50)) {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("s.csv");
        let samples = values
            .iter()
            .enumerate()
            .map(|(i, v)| Sample::new(i as i64 * 20, v[0], v[1], v[2]))
            .collect();
        let stream = TimeSeries::new(StreamKind::WATCH_GYRO, 50.0, samples).unwrap();
        stream_csv::write_stream(&p, &stream).unwrap();
        let back = stream_csv::read_stream(&p, StreamKind::WATCH_GYRO, 50.0).unwrap();
        prop_assert_eq!(back, stream);
    }
}

#[test]
fn model_file_round_trips_and_appends() {
    let cfg = SynthConfig {
        subjects: 1,
        duration_s: 10.0,
        activities: synth::activity_names(2).unwrap(),
        ..SynthConfig::default()
    };
    let recs = synth::generate(&cfg).unwrap();
    let dcfg = DfamConfig::default();
    let model = core_dfam::train(&recs, &dcfg).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("m.json");
    model_file::save_model(&path, &model).unwrap();
    let first = fs::read(&path).unwrap();
    assert_eq!(model_file::load_model(&path).unwrap(), model);

    let sig = SignatureBuilder::from_config(&dcfg)
        .unwrap()
        .recording(&recs[0], &dcfg.segmentation())
        .unwrap()
        .remove(0);
    let label = ActivityLabel::named("sitting").unwrap();
    let appended = model_file::append_signature(&path, &label, sig.clone()).unwrap();
    assert_eq!(appended.signature_count(), model.signature_count() + 1);
    let reloaded = model_file::load_model(&path).unwrap();
    assert_eq!(reloaded, appended);
    let sitting = reloaded.activities.iter().find(|a| a.label == "sitting").unwrap();
    assert_eq!(sitting.signatures, vec![sig]);
    // existing activities are untouched
    for a in &model.activities {
        assert_eq!(reloaded.activities.iter().find(|b| b.label == a.label), Some(a));
    }
    assert_ne!(fs::read(&path).unwrap(), first);
}

#[test]
fn model_file_rejects_other_versions_and_garbage() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("m.json");
    fs::write(&path, r#"{"version":"dfam/2","config":{},"activities":[]}"#).unwrap();
    assert_eq!(model_file::load_model(&path).unwrap_err().category(), Category::Model);
    fs::write(&path, "not json").unwrap();
    assert_eq!(model_file::load_model(&path).unwrap_err().category(), Category::Model);
    assert_eq!(
        model_file::load_model(&tmp.path().join("absent.json")).unwrap_err().category(),
        Category::Io
    );
}

#[test]
fn every_category_has_a_distinct_exit_code() {
    let mut codes: Vec<u8> = Category::ALL.iter().map(|c| c.exit_code()).collect();
    codes.sort_unstable();
    codes.dedup();
    assert_eq!(codes.len(), Category::ALL.len());
    assert!(!codes.contains(&0));
}
