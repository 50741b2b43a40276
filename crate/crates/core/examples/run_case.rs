//! Configure a case from TOML, run every method and write the CSV reports.
//!
//! `cargo run --example run_case -- [out-dir]`

use std::path::PathBuf;

use pgd_core::config::{CaseConfig, Overrides};
use pgd_core::report::emit_reports;
use pgd_core::run::{run_case, summary};

const CONFIG: &str = r#"
case = 5
desk_scale = true
m_max = 16
methods = ["lpgd1", "hpgd"]

[solver]
j_max = 25
"#;

fn main() -> pgd_core::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pgd-run-case"));
    let cfg = CaseConfig::from_toml_str(
        CONFIG,
        &Overrides {
            out_dir: Some(out),
            ..Overrides::default()
        },
    )?;
    let run = run_case(&cfg)?;
    for line in summary(&run) {
        println!("{line}");
    }
    for path in emit_reports(&cfg, Some(&run), &cfg.out_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
