//! One case end to end: references, SVD baseline and the requested PGD runs.

use nalgebra::DMatrix;

use crate::config::CaseConfig;
use crate::error::{PgdError, Result};
use crate::fem::Problem;
use crate::metrics::{Baseline, RunReport, Termination};
use crate::pgd::hamiltonian::{run_hpgd, HamiltonianState};
use crate::pgd::lagrangian::{run_lpgd, TimeScheme};
use crate::pgd::separated::SeparatedField;
use crate::pgd::{Method, SolverSettings};
use crate::reference::{
    analytical_field, solve_hamiltonian_cn, solve_lagrangian_cn, solve_newmark, svd_baseline, SeriesParams,
    SvdBaseline, TrajectorySet,
};

/// Number of series terms used for the closed-form comparison.
pub const SERIES_TERMS: usize = 200;

#[derive(Debug, Clone)]
pub enum Modes {
    Lagrangian(SeparatedField),
    Hamiltonian(HamiltonianState),
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub report: RunReport,
    pub modes: Modes,
    /// Final displacement over all free DOFs, lift included.
    pub displacement: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct CaseRun {
    pub problem: Problem,
    pub lagrangian_cn: TrajectorySet,
    pub hamiltonian_cn: TrajectorySet,
    pub newmark: Option<TrajectorySet>,
    /// Truncations of the reference with the lift removed.
    pub svd: SvdBaseline,
    pub exact: Option<DMatrix<f64>>,
    pub methods: Vec<MethodRun>,
    /// Methods that aborted with an error, with the message.
    pub failures: Vec<(Method, String)>,
}

impl CaseRun {
    pub fn method(&self, method: Method) -> Option<&MethodRun> {
        self.methods.iter().find(|r| r.method == method)
    }

    /// Reference each method is measured against.
    pub fn reference_for(&self, method: Method) -> &TrajectorySet {
        match method {
            Method::Lpgd1 => &self.lagrangian_cn,
            Method::Lpgd2 => self.newmark.as_ref().unwrap_or(&self.lagrangian_cn),
            Method::Hpgd => &self.hamiltonian_cn,
        }
    }

    pub fn any_failure(&self) -> bool {
        !self.failures.is_empty() || self.methods.iter().any(|r| r.report.failed())
    }
}

/// The reference with the lift removed, so that its truncations are
/// comparable with the separated part of a PGD solution.
pub fn homogeneous_reference(problem: &Problem, reference: &TrajectorySet) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let zero = DMatrix::zeros(problem.active, problem.time_nodes());
    let q = &reference.displacement - problem.embed_displacement(&zero)?;
    let p = &reference.momentum - problem.embed_momentum(&zero)?;
    Ok((q, p))
}

pub fn run_case(cfg: &CaseConfig) -> Result<CaseRun> {
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let problem = Problem::new(&scenario)?;
    let exact = if cfg.case == 4 {
        let params = SeriesParams {
            length: cfg.geometry.length,
            wave_speed: (cfg.material.youngs_modulus / cfg.material.density).sqrt(),
            strain: cfg.loading.initial_strain,
        };
        Some(analytical_field(&problem.mesh, &problem.grid, SERIES_TERMS, &params)?)
    } else {
        None
    };
    run_problem(problem, &cfg.methods, &cfg.settings(), cfg.m_max, exact)
}

/// Run on an already assembled problem; `exact` is an optional closed-form
/// displacement over all free DOFs.
pub fn run_problem(
    problem: Problem,
    methods: &[Method],
    settings: &SolverSettings,
    m_max: usize,
    exact: Option<DMatrix<f64>>,
) -> Result<CaseRun> {
    let lagrangian_cn = solve_lagrangian_cn(&problem)?;
    let hamiltonian_cn = solve_hamiltonian_cn(&problem)?;
    let newmark = if methods.contains(&Method::Lpgd2) {
        Some(solve_newmark(&problem)?)
    } else {
        None
    };
    let (q_hom, _) = homogeneous_reference(&problem, &lagrangian_cn)?;
    let (_, p_hom) = homogeneous_reference(&problem, &hamiltonian_cn)?;
    let svd = svd_baseline(&q_hom, &p_hom, &problem.full_ops.l2_mass, problem.dt(), m_max)?;

    let mut run = CaseRun {
        problem,
        lagrangian_cn,
        hamiltonian_cn,
        newmark,
        svd,
        exact,
        methods: Vec::new(),
        failures: Vec::new(),
    };
    for &method in methods {
        match run_method(&run, method, settings, m_max) {
            Ok(r) => run.methods.push(r),
            Err(e) => run.failures.push((method, e.to_string())),
        }
    }
    Ok(run)
}

fn run_method(run: &CaseRun, method: Method, settings: &SolverSettings, m_max: usize) -> Result<MethodRun> {
    let problem = &run.problem;
    let baseline = Baseline {
        reference: Some(run.reference_for(method)),
        exact: run.exact.as_ref(),
    };
    let (n, nt) = (problem.active, problem.time_nodes());
    let (report, modes, homogeneous) = match method {
        Method::Lpgd1 | Method::Lpgd2 => {
            let scheme = if method == Method::Lpgd1 {
                TimeScheme::CrankNicolson
            } else {
                TimeScheme::Newmark
            };
            let (field, report) = run_lpgd(problem, scheme, settings, m_max, &baseline)?;
            let q = field.dense(n, nt);
            (report, Modes::Lagrangian(field), q)
        }
        Method::Hpgd => {
            let (state, report) = run_hpgd(problem, settings, m_max, &baseline)?;
            let q = state.q.dense(n, nt);
            (report, Modes::Hamiltonian(state), q)
        }
    };
    if report.ranks.is_empty() {
        return Err(PgdError::InvalidState("run produced no records".into()));
    }
    Ok(MethodRun {
        method,
        displacement: problem.embed_displacement(&homogeneous)?,
        report,
        modes,
    })
}

/// Short status line per method.
pub fn summary(run: &CaseRun) -> Vec<String> {
    let mut lines = Vec::new();
    for r in &run.methods {
        let last = r.report.ranks.last().expect("non-empty");
        let status = match &r.report.termination {
            Termination::MaxRank => "max rank".to_string(),
            Termination::ZeroEnrichment { rank } => format!("zero enrichment at m = {rank}"),
            Termination::Failure { rank, message } => format!("failed at m = {rank}: {message}"),
        };
        lines.push(format!(
            "{:<6} m = {:>3}  eps_q = {:.3e}  eps_p = {:.3e}  energy err = {:.3e}  ({status})",
            r.method.name(),
            last.rank,
            last.eps_q.unwrap_or(f64::NAN),
            last.eps_p.unwrap_or(f64::NAN),
            last.energy_error.unwrap_or(f64::NAN),
        ));
    }
    for (m, msg) in &run.failures {
        lines.push(format!("{:<6} aborted: {msg}", m.name()));
    }
    lines
}
