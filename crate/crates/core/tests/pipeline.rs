use higher_dl::experiment::{run, CheckId, ExperimentConfig, Workspace};
use higher_dl::tori::TorusKind;

#[test]
fn level_one_report_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(3, 1);
    cfg.out = Some(dir.path().join("report.json"));
    cfg.jobs = 2;
    let a = run(&cfg).unwrap();
    assert!(a.all_passed());
    assert_eq!(a.summary.pass, a.records.len());
    let b = run(&cfg).unwrap();
    assert_eq!(
        serde_json::to_value(a.without_timings()).unwrap(),
        serde_json::to_value(b.without_timings()).unwrap()
    );

    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    for key in ["config", "records", "summary", "artifacts"] {
        assert!(written.get(key).is_some(), "missing {key}");
    }
    let rec = &written["records"][0];
    for key in ["check", "params", "lhs", "rhs", "expected", "pass", "elapsed_ms"] {
        assert!(rec.get(key).is_some(), "record missing {key}");
    }
}

#[test]
fn negative_control_is_reported_as_differ() {
    let mut cfg = ExperimentConfig::new(2, 2);
    cfg.checks = vec![CheckId::Gamma];
    let report = run(&cfg).unwrap();
    assert!(report.all_passed());
    let controls: Vec<_> = report.records.iter().filter(|r| r.expected == "differ").collect();
    assert!(!controls.is_empty());
    assert!(controls.iter().all(|r| r.lhs != r.rhs));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let kinds = [TorusKind::Split, TorusKind::Nonsplit];
    let fresh = Workspace::build(2, 2, &kinds, Some(dir.path())).unwrap();
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let cached = Workspace::build(2, 2, &kinds, Some(dir.path())).unwrap();
    for (a, b) in fresh.tori.iter().zip(&cached.tori) {
        assert_eq!(a.table_hash, b.table_hash);
        assert_eq!(a.characters, b.characters);
    }
}

#[test]
fn rejects_unsupported_levels() {
    assert!(ExperimentConfig::new(2, 3).validate().is_err());
    assert!(ExperimentConfig::new(6, 2).validate().is_err());
    assert!(ExperimentConfig::new(5, 4).validate().is_err());
    assert_eq!(ExperimentConfig::new(4, 1).validate().unwrap(), (2, 2));
}
