use pgd_core::config::CaseConfig;
use pgd_core::metrics::error_field_grid;
use pgd_core::pgd::Method;
use pgd_core::report::{emit_reports, parse_grid, MANIFEST};
use pgd_core::run::run_case;

#[test]
fn field_error_file_round_trips() {
    let mut cfg = CaseConfig::desk(1).unwrap();
    cfg.m_max = 3;
    cfg.methods = vec![Method::Lpgd1];
    let run = run_case(&cfg).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    emit_reports(&cfg, Some(&run), tmp.path()).unwrap();

    let text = std::fs::read_to_string(tmp.path().join("field_error_lpgd1.csv")).unwrap();
    let (xs, times, grid) = parse_grid(&text).unwrap();
    let r = run.method(Method::Lpgd1).unwrap();
    let expected = error_field_grid(&r.displacement, &run.lagrangian_cn.displacement).unwrap();
    assert_eq!(xs, run.problem.mesh.free_nodes());
    assert_eq!(times, run.problem.grid.times());
    assert_eq!(grid, expected);
}

#[test]
fn modes_file_lists_every_factor() {
    let mut cfg = CaseConfig::desk(2).unwrap();
    cfg.m_max = 2;
    cfg.methods = vec![Method::Hpgd];
    let run = run_case(&cfg).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    emit_reports(&cfg, Some(&run), tmp.path()).unwrap();

    let text = std::fs::read_to_string(tmp.path().join("modes_hpgd.csv")).unwrap();
    let mut factors: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    factors.dedup();
    assert!(factors.len() >= 4, "{factors:?}");
    let dim = run.problem.active;
    let nodes = run.problem.time_nodes();
    let expected_rows = 2 * 2 * dim + 2 * 2 * nodes;
    assert!(text.lines().count() - 1 >= expected_rows);
}

#[test]
fn no_methods_writes_only_the_manifest() {
    let mut cfg = CaseConfig::desk(2).unwrap();
    cfg.methods.clear();
    let tmp = tempfile::tempdir().unwrap();
    let written = emit_reports(&cfg, None, tmp.path()).unwrap();
    assert_eq!(written.len(), 1);
    assert!(written[0].ends_with(MANIFEST));
    let back: toml::Table = std::fs::read_to_string(&written[0]).unwrap().parse().unwrap();
    assert!(back["files"].as_array().unwrap().is_empty());
}
