//! CSV and manifest output of a case run.
//!
//! Floats are written with `{:e}`, the shortest representation that parses
//! back to the same `f64`, so data files are byte-stable across runs. Only
//! the manifest carries a timestamp.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::CaseConfig;
use crate::error::{PgdError, Result};
use crate::metrics::{error_field_grid, Termination};
use crate::pgd::separated::SeparatedField;
use crate::run::{CaseRun, Modes};

pub const MANIFEST: &str = "manifest.toml";

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| PgdError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[derive(Serialize)]
struct MethodStatus {
    method: String,
    final_rank: usize,
    termination: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    generated_unix: u64,
    version: &'static str,
    files: Vec<String>,
    methods: Vec<MethodStatus>,
    config: &'a CaseConfig,
}

fn termination_text(t: &Termination) -> String {
    match t {
        Termination::MaxRank => "max_rank".into(),
        Termination::ZeroEnrichment { rank } => format!("zero_enrichment at m = {rank}"),
        Termination::Failure { rank, message } => format!("failure at m = {rank}: {message}"),
    }
}

/// Write every report file for `run` into `dir` (created if needed).
/// Returns the paths written, manifest last.
pub fn emit_reports(cfg: &CaseConfig, run: Option<&CaseRun>, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| PgdError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut statuses = Vec::new();
    if let Some(run) = run.filter(|r| !r.methods.is_empty()) {
        written.push(write_file(dir, "errors.csv", &errors_csv(run))?);
        written.push(write_file(dir, "svd.csv", &svd_csv(run))?);
        written.push(write_file(dir, "condition.csv", &condition_csv(run))?);
        written.push(write_file(dir, "energy.csv", &energy_csv(run))?);
        for r in &run.methods {
            let name = r.method.name();
            let grid = error_field_grid(&r.displacement, &run.reference_for(r.method).displacement)?;
            let text = grid_csv(run.problem.mesh.free_nodes(), &run.problem.grid.times(), &grid);
            written.push(write_file(dir, &format!("field_error_{name}.csv"), &text)?);
            written.push(write_file(dir, &format!("modes_{name}.csv"), &modes_csv(&r.modes))?);
        }
    }
    if let Some(run) = run {
        for r in &run.methods {
            statuses.push(MethodStatus {
                method: r.method.name().into(),
                final_rank: r.report.final_rank(),
                termination: termination_text(&r.report.termination),
            });
        }
        for (m, msg) in &run.failures {
            statuses.push(MethodStatus {
                method: m.name().into(),
                final_rank: 0,
                termination: format!("aborted: {msg}"),
            });
        }
    }
    let manifest = Manifest {
        generated_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        version: env!("CARGO_PKG_VERSION"),
        files: written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        methods: statuses,
        config: cfg,
    };
    let text = toml::to_string(&manifest).map_err(|e| PgdError::InvalidState(e.to_string()))?;
    written.push(write_file(dir, MANIFEST, &text)?);
    Ok(written)
}

/// `m,method,eps_q,eps_p,energy_err_max,frobenius_q`, plus `eps_q_exact`
/// when a closed-form solution is available. Rank 0 (lift only) is omitted.
pub fn errors_csv(run: &CaseRun) -> String {
    let exact = run.exact.is_some();
    let mut s = String::from("m,method,eps_q,eps_p,energy_err_max,frobenius_q");
    if exact {
        s.push_str(",eps_q_exact");
    }
    s.push('\n');
    for r in &run.methods {
        for rec in r.report.ranks.iter().filter(|rec| rec.rank > 0) {
            let _ = write!(
                s,
                "{},{},{},{},{},{}",
                rec.rank,
                r.method.name(),
                opt(rec.eps_q),
                opt(rec.eps_p),
                opt(rec.energy_error),
                opt(rec.frobenius_q)
            );
            if exact {
                let _ = write!(s, ",{}", opt(rec.eps_q_exact));
            }
            s.push('\n');
        }
    }
    s
}

/// Truncation errors of the reference, in Frobenius and space-time norms.
pub fn svd_csv(run: &CaseRun) -> String {
    let q = &run.svd.displacement;
    let p = &run.svd.momentum;
    let q_norm = q.spacetime_errors[0];
    let p_norm = p.spacetime_errors[0];
    let rel = |e: f64, n: f64| if n > 0.0 { num(e / n) } else { String::new() };
    let mut s = String::from("m,eps_q,eps_p,frobenius_q,frobenius_p,sigma_q\n");
    for m in 1..q.frobenius_errors.len().min(p.frobenius_errors.len()) {
        let _ = writeln!(
            s,
            "{m},{},{},{},{},{}",
            rel(q.spacetime_errors[m], q_norm),
            rel(p.spacetime_errors[m], p_norm),
            num(q.frobenius_errors[m]),
            num(p.frobenius_errors[m]),
            num(q.singular_values[m - 1])
        );
    }
    s
}

pub fn condition_csv(run: &CaseRun) -> String {
    let mut s = String::from("m,method,matrix,kappa\n");
    for r in &run.methods {
        for rec in &r.report.ranks {
            for (name, k) in &rec.conditions {
                let _ = writeln!(s, "{},{},{},{}", rec.rank, r.method.name(), name, num(*k));
            }
        }
    }
    s
}

/// Energy of each final reduced solution and of its reference.
pub fn energy_csv(run: &CaseRun) -> String {
    let times = run.problem.grid.times();
    let mut s = String::from("t,method,H\n");
    for r in &run.methods {
        let name = r.method.name();
        for (label, series) in [
            (name.to_string(), &r.report.energy),
            (format!("{name}_reference"), &r.report.reference_energy),
        ] {
            for (t, h) in times.iter().zip(series) {
                let _ = writeln!(s, "{},{label},{}", num(*t), num(*h));
            }
        }
    }
    s
}

/// Header `x,<t₀>,<t₁>,…`; one row per node.
pub fn grid_csv(xs: &[f64], times: &[f64], grid: &DMatrix<f64>) -> String {
    let mut s = String::from("x");
    for t in times {
        let _ = write!(s, ",{}", num(*t));
    }
    s.push('\n');
    for (i, x) in xs.iter().enumerate() {
        s.push_str(&num(*x));
        for v in grid.row(i).iter() {
            let _ = write!(s, ",{}", num(*v));
        }
        s.push('\n');
    }
    s
}

/// Inverse of [`grid_csv`]: `(xs, times, grid)`.
pub fn parse_grid(text: &str) -> Result<(Vec<f64>, Vec<f64>, DMatrix<f64>)> {
    let bad = |line: usize, msg: &str| PgdError::InvalidArgument(format!("grid line {line}: {msg}"));
    let parse = |line: usize, v: &str| v.parse::<f64>().map_err(|_| bad(line, "not a number"));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty input"))?;
    let mut cells = header.split(',');
    if cells.next() != Some("x") {
        return Err(bad(1, "header must start with x"));
    }
    let times = cells.map(|c| parse(1, c)).collect::<Result<Vec<_>>>()?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (k, line) in lines.enumerate() {
        let mut cells = line.split(',');
        xs.push(parse(k + 2, cells.next().unwrap_or(""))?);
        let row = cells.map(|c| parse(k + 2, c)).collect::<Result<Vec<_>>>()?;
        if row.len() != times.len() {
            return Err(bad(k + 2, "row length differs from header"));
        }
        values.extend(row);
    }
    let grid = DMatrix::from_row_slice(xs.len(), times.len(), &values);
    Ok((xs, times, grid))
}

fn push_factors(s: &mut String, factor: &str, series: &[impl AsRef<[f64]>]) {
    for (k, v) in series.iter().enumerate() {
        for (i, x) in v.as_ref().iter().enumerate() {
            let _ = writeln!(s, "{factor},{},{i},{}", k + 1, num(*x));
        }
    }
}

fn push_field(s: &mut String, field: &SeparatedField, spatial: &str, temporal: &str, rate: &str) {
    let mus: Vec<&[f64]> = field.spatial.iter().map(|v| v.as_slice()).collect();
    push_factors(s, spatial, &mus);
    push_factors(s, temporal, &field.temporal);
    push_factors(s, rate, &field.rate);
}

/// Long format `factor,mode,index,value`; spatial factors are indexed by free
/// DOF, temporal ones by time node.
pub fn modes_csv(modes: &Modes) -> String {
    let mut s = String::from("factor,mode,index,value\n");
    match modes {
        Modes::Lagrangian(f) => push_field(&mut s, f, "mu", "lambda", "omega"),
        Modes::Hamiltonian(st) => {
            push_field(&mut s, &st.q, "mu", "lambda", "lambda_rate");
            push_field(&mut s, &st.p, "nu", "omega", "omega_rate");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip_is_bit_exact() {
        let xs = [0.1, 0.2, 1.0 / 3.0];
        let ts = [0.0, 1e-300, 2.5e-4, f64::MAX];
        let grid = DMatrix::from_fn(3, 4, |i, j| ((i * 7 + j) as f64).sqrt() * 1e-7 / 3.0);
        let text = grid_csv(&xs, &ts, &grid);
        let (x2, t2, g2) = parse_grid(&text).unwrap();
        assert_eq!(x2, xs);
        assert_eq!(t2, ts);
        assert_eq!(g2, grid);
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        assert!(parse_grid("x,0,1\n0.5,1\n").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_grid("y,0\n").is_err());
    }

    #[test]
    fn infinite_values_are_written_and_read() {
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!("inf".parse::<f64>().unwrap(), f64::INFINITY);
        assert_eq!(opt(None), "");
    }
}
