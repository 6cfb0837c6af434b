use std::fs;
use std::path::Path;

use roomclim::study::{run_study, validate_study, write_demo_inputs, RunOptions, StudyConfig};
use roomclim::weather::WeatherFormat;

fn single_city(dir: &Path) -> StudyConfig {
    let path = write_demo_inputs(dir, WeatherFormat::Csv).unwrap();
    let mut cfg = StudyConfig::load(&path).unwrap();
    cfg.cities.retain(|c| c.name == "Kolkata");
    cfg.periods.truncate(1);
    cfg.scenarios.truncate(1);
    cfg.model_classes.truncate(1);
    cfg.attribution = false;
    cfg
}

#[test]
fn one_city_one_future_gives_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = single_city(dir.path());
    assert_eq!(cfg.simulation_count(), 2);
    let report = run_study(&cfg, RunOptions::default(), None).unwrap();
    assert!(report.failures.is_empty());
    assert_eq!(report.outputs.len(), 2);
    assert!(report.baseline("Kolkata").is_some());
    let results = fs::read_to_string(cfg.output_dir.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 3);
    assert!(cfg.output_dir.join("manifest.json").exists());
}

#[test]
fn repeated_runs_write_identical_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = single_city(dir.path());
    let first_dir = dir.path().join("a");
    let second_dir = dir.path().join("b");
    cfg.output_dir = first_dir.clone();
    run_study(
        &cfg,
        RunOptions {
            workers: Some(1),
            trace: false,
        },
        None,
    )
    .unwrap();
    cfg.output_dir = second_dir.clone();
    run_study(
        &cfg,
        RunOptions {
            workers: Some(3),
            trace: false,
        },
        None,
    )
    .unwrap();
    for name in ["results.csv", "changes.csv"] {
        let a = fs::read(first_dir.join(name)).unwrap();
        let b = fs::read(second_dir.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn validation_reports_a_missing_weather_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = single_city(dir.path());
    cfg.cities[0].weather = dir.path().join("nowhere.epw");
    let err = validate_study(&cfg).unwrap_err();
    assert!(err.to_string().contains("nowhere.epw"), "{err}");
}
