use std::path::Path;
use std::process::{Command, Output};

fn pgd(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pgd"));
    cmd.args(args).env_remove("PGD_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("PGD_OUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(String::from).collect()
}

#[test]
fn unknown_case_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(pgd(&["run", "--case", "7", "--desk-scale", "--out", out], None).status.code(), Some(3));
    assert_eq!(pgd(&["run", "--case", "x"], None).status.code(), Some(3));
    assert_eq!(pgd(&["run", "--case", "2", "--methods", "svd"], None).status.code(), Some(3));
}

#[test]
fn bad_config_file_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[geometry]\nelements = 0\n").unwrap();
    let out = pgd(
        &["run", "--case", "2", "--desk-scale", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("geometry.elements"));

    std::fs::write(&cfg, "[solver]\nupdate = true\n").unwrap();
    let out = pgd(&["run", "--case", "1", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));

    let missing = tmp.path().join("missing.toml");
    let out = pgd(&["run", "--case", "2", "--config", missing.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("from-env");
    let out = pgd(&["run", "--case", "3", "--desk-scale", "--m-max", "4", "--methods", "hpgd"], Some(&dir));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("manifest.toml").is_file());
    assert!(dir.join("field_error_hpgd.csv").is_file());
    assert!(!dir.join("field_error_lpgd1.csv").exists());

    // --out wins over the environment
    let explicit = tmp.path().join("explicit");
    let out = pgd(
        &["run", "--case", "3", "--desk-scale", "--m-max", "2", "--methods", "hpgd", "--out", explicit.to_str().unwrap()],
        Some(&dir.join("unused")),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(explicit.join("errors.csv").is_file());
    assert!(!dir.join("unused").exists());
}

#[test]
fn errors_csv_has_one_row_per_rank_and_method() {
    let tmp = tempfile::tempdir().unwrap();
    let out = pgd(&["run", "--case", "4", "--desk-scale", "--m-max", "5", "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = lines(&tmp.path().join("errors.csv"));
    assert_eq!(rows[0], "m,method,eps_q,eps_p,energy_err_max,frobenius_q,eps_q_exact");
    assert_eq!(rows.len() - 1, 5 * 3);
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 7);
        let exact: f64 = cols[6].parse().unwrap();
        assert!(exact.is_finite() && exact > 0.0);
    }

    let svd = lines(&tmp.path().join("svd.csv"));
    assert_eq!(svd[0], "m,eps_q,eps_p,frobenius_q,frobenius_p,sigma_q");
    assert_eq!(svd.len() - 1, 5);

    let manifest: toml::Table = std::fs::read_to_string(tmp.path().join("manifest.toml")).unwrap().parse().unwrap();
    assert_eq!(manifest["config"]["case"].as_integer(), Some(4));
    assert_eq!(manifest["methods"].as_array().unwrap().len(), 3);
}

#[test]
fn zero_load_run_stops_at_first_enrichment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("zero.toml");
    std::fs::write(&cfg, "[loading]\namplitude = 0.0\n").unwrap();
    let out = pgd(
        &["run", "--case", "2", "--desk-scale", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: toml::Table = std::fs::read_to_string(tmp.path().join("manifest.toml")).unwrap().parse().unwrap();
    for m in manifest["methods"].as_array().unwrap() {
        assert_eq!(m["final_rank"].as_integer(), Some(0), "{m}");
        assert!(m["termination"].as_str().unwrap().starts_with("zero_enrichment"));
    }
}

#[test]
fn verify_single_check() {
    let out = pgd(&["verify", "--only", "1"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]  1 assembly oracle"));
}
