//! Shipped configs and data files, and CSV loading from disk.

use std::path::{Path, PathBuf};

use fhtd_core::harness::{
    housing_like_csv, load_csv, run_experiment, CsvDataset, DataError, ExperimentConfig, ExperimentKind,
    ExperimentReport, Transform,
};

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn bundled_panel_is_reproducible() {
    let on_disk = std::fs::read_to_string(workspace().join("data/housing_like.csv")).unwrap();
    assert_eq!(on_disk, housing_like_csv(240, 12, 2024));
}

#[test]
fn shipped_configs_parse() {
    let dir = workspace().join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(path.to_str().unwrap()).unwrap();
            cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

#[test]
fn csv_from_disk_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    std::fs::write(&path, "date,y,a,b\n2000-01,1,10,5\n2000-02,2,20,6\n2000-03,4,40,8\n").unwrap();
    let spec = CsvDataset {
        path: path.clone(),
        date: Some("date".into()),
        y: "y".into(),
        y_transform: Transform::Diff,
        exogenous: vec!["b".into()],
        default_transform: Transform::LogDiff,
        transforms: Default::default(),
        max_lag: 1,
    };
    let loaded = load_csv(&spec).unwrap();
    assert_eq!(loaded.dataset.y, vec![1.0, 2.0]);
    assert_eq!(loaded.exogenous, vec!["b"]);
    assert!((loaded.dataset.x[0][1] - (8f64 / 6.0).ln()).abs() < 1e-12);
    assert_eq!(loaded.dates, vec!["2000-02", "2000-03"]);

    let missing = CsvDataset { path: dir.path().join("nope.csv"), ..spec };
    assert!(matches!(load_csv(&missing), Err(DataError::Io { .. })));
}

#[test]
fn example_kinds_report() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Example31);
    cfg.reps = 50;
    cfg.example31.n = 200;
    let ExperimentReport::Example31 { mspe, .. } = run_experiment(&cfg).unwrap() else { panic!() };
    assert!(mspe.full > 0.0 && mspe.single > 0.0);
    let direct = fhtd_core::eval::example31_mspe(2, 200, 50, cfg.seed).unwrap();
    assert_eq!(mspe, direct);
}
