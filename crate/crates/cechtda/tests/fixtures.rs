//! Bundled fixtures must be exactly what the generators produce.
//! Run with `CECHTDA_REGEN_FIXTURES=1` to rewrite it.

use std::path::PathBuf;

use cechtda::core::ingest::LabelMap;
use cechtda::fixtures::{clouds40, ecg6};
use cechtda::io::{parse_record_csv, point_cloud_to_csv, read_point_cloud, read_subjects, record_to_csv, subjects_to_csv};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn dir() -> PathBuf {
    root().join("ecg6")
}

fn check(path: &std::path::Path, text: &str) {
    if std::env::var_os("CECHTDA_REGEN_FIXTURES").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, text).unwrap();
    }
    let on_disk = std::fs::read_to_string(path).expect("fixture present");
    assert_eq!(on_disk, text, "{} is stale", path.display());
}

#[test]
fn clouds40_matches_generator() {
    let base = root().join("clouds40");
    let clouds = clouds40();
    let index: Vec<_> = clouds.iter().map(|c| (c.subject_id.clone(), c.label.unwrap())).collect();
    check(&base.join("subjects.csv"), &subjects_to_csv(&index));
    for c in &clouds {
        let path = base.join("clouds").join(format!("{}.csv", c.subject_id));
        check(&path, &point_cloud_to_csv(c));
        let back = read_point_cloud(&path).unwrap();
        assert_eq!(back.coords, c.coords);
    }
    assert_eq!(read_subjects(&base.join("subjects.csv")).unwrap(), index);
}

#[test]
fn ecg6_matches_generator() {
    for record in ecg6() {
        let path = dir().join(format!("{}.csv", record.subject_id));
        let text = record_to_csv(&record);
        check(&path, &text);
        assert_eq!(parse_record_csv(&path, &text, &LabelMap::default()).unwrap(), record);
    }
}
