//! Lagrangian PGD: displacement-only separated representation
//! `q = q₀ + Σ μᵢ(x) λᵢ(t)`, with Crank–Nicolson (L-PGD1) or Newmark
//! (L-PGD2) temporal solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{PgdError, Result};
use crate::fem::problem::Problem;
use crate::fem::time_integrals::{product_unchecked, product_weights};
use crate::linalg::{condition_number, SymTridiagonal};
use crate::metrics::{Baseline, EnergyKind, RankRecord, RunReport, Termination};
use crate::pgd::separated::{rank_one_norm, stagnation, SeparatedField};
use crate::pgd::{initial_temporal_guess, EnrichmentLog, Method, SolverSettings, ZERO_MODE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScheme {
    CrankNicolson,
    Newmark,
}

impl TimeScheme {
    pub fn method(self) -> Method {
        match self {
            TimeScheme::CrankNicolson => Method::Lpgd1,
            TimeScheme::Newmark => Method::Lpgd2,
        }
    }
}

/// Dense sums of the modes found so far, used to form residuals.
#[derive(Debug, Clone)]
pub struct LagrangianResidual<'a> {
    pub problem: &'a Problem,
    /// `Σ μᵢ λᵢ`
    pub displacement: DMatrix<f64>,
    /// `Σ μᵢ ωᵢ`
    pub rate: DMatrix<f64>,
    /// `Σ μᵢ αᵢ` (Newmark accelerations; zero for Crank–Nicolson)
    pub acceleration: DMatrix<f64>,
}

impl<'a> LagrangianResidual<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        let (n, nt) = (problem.active, problem.time_nodes());
        Self {
            problem,
            displacement: DMatrix::zeros(n, nt),
            rate: DMatrix::zeros(n, nt),
            acceleration: DMatrix::zeros(n, nt),
        }
    }

    pub fn from_field(problem: &'a Problem, field: &SeparatedField) -> Self {
        let (n, nt) = (problem.active, problem.time_nodes());
        Self {
            problem,
            displacement: field.dense(n, nt),
            rate: field.dense_rate(n, nt),
            acceleration: field.dense_acceleration(n, nt),
        }
    }

    fn add(&mut self, mode: &LagrangianMode) {
        for k in 0..mode.lambda.len() {
            self.displacement.column_mut(k).axpy(mode.lambda[k], &mode.mu, 1.0);
            self.rate.column_mut(k).axpy(mode.omega[k], &mode.mu, 1.0);
            if let Some(a) = &mode.acceleration {
                self.acceleration.column_mut(k).axpy(a[k], &mode.mu, 1.0);
            }
        }
    }
}

/// Solve `(m M + c C + k K) μ = R` for a given temporal mode `λ` with
/// companion `ω ≈ λ̇`, where `k = ∫λ²`, `c = ∫ωλ` and
/// `m = ∫λ̈λ = ω(T)λ(T) − ∫ω²`.
pub fn spatial_solve_l(res: &LagrangianResidual, lambda: &[f64], omega: &[f64]) -> Result<DVector<f64>> {
    let p = res.problem;
    let ops = &p.ops;
    let h = p.dt();
    let nt = p.time_nodes();
    if lambda.len() != nt || omega.len() != nt {
        return Err(PgdError::invalid("temporal mode length does not match the time grid"));
    }
    let last = nt - 1;
    let k = product_unchecked(lambda, lambda, h);
    if k <= 0.0 {
        return Err(PgdError::EnrichmentBreakdown("temporal mode vanished".into()));
    }
    let c = product_unchecked(omega, lambda, h);
    let m = omega[last] * lambda[last] - product_unchecked(omega, omega, h);

    let wl = DVector::from_vec(product_weights(lambda, h));
    let ww = DVector::from_vec(product_weights(omega, h));
    let mut r = &p.lagrangian_forcing * &wl;
    // −∫ λ M Ω̈ = −M [Ω(T) λ(T) − ∫ Ω ω]
    let inertial = res.rate.column(last) * lambda[last] - &res.rate * &ww;
    r -= ops.mass.mul_vec(&inertial);
    if ops.is_damped() {
        r -= ops.damping.mul_vec(&(&res.rate * &wl));
    }
    r -= ops.stiffness.mul_vec(&(&res.displacement * &wl));

    let a = SymTridiagonal::combine(&[(m, &ops.mass), (c, &ops.damping), (k, &ops.stiffness)]);
    let lu = a
        .factor()
        .map_err(|e| PgdError::EnrichmentBreakdown(format!("spatial system: {e}")))?;
    let mu = lu.solve(&r);
    if mu.iter().any(|v| !v.is_finite()) {
        return Err(PgdError::EnrichmentBreakdown("spatial solve produced non-finite values".into()));
    }
    Ok(mu)
}

/// Projections of the residual context on `μ` at every time node.
struct Projected {
    load: DVector<f64>,
    stiffness: DVector<f64>,
    mass_rate: DVector<f64>,
    damping_rate: Option<DVector<f64>>,
    mass_acceleration: DVector<f64>,
}

fn project(res: &LagrangianResidual, mu: &DVector<f64>) -> Projected {
    let ops = &res.problem.ops;
    let damped = ops.is_damped();
    Projected {
        load: res.problem.lagrangian_forcing.tr_mul(mu),
        stiffness: res.displacement.tr_mul(&ops.stiffness.mul_vec(mu)),
        mass_rate: res.rate.tr_mul(&ops.mass.mul_vec(mu)),
        damping_rate: damped.then(|| res.rate.tr_mul(&ops.damping.mul_vec(mu))),
        mass_acceleration: res.acceleration.tr_mul(&ops.mass.mul_vec(mu)),
    }
}

/// Temporal factors of a mode: `(λ, ω, α)`; `α` only for Newmark.
pub type TemporalMode = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

/// Integrate `mₓ λ̈ + cₓ λ̇ + kₓ λ = μᵀ(residual)` from rest.
pub fn temporal_solve_l(res: &LagrangianResidual, mu: &DVector<f64>, scheme: TimeScheme) -> Result<TemporalMode> {
    let p = res.problem;
    let ops = &p.ops;
    let h = p.dt();
    let nt = p.time_nodes();
    let mx = ops.mass.quad(mu.as_slice());
    let kx = ops.stiffness.quad(mu.as_slice());
    let cx = ops.damping.quad(mu.as_slice());
    if !(mx > 0.0) || !(kx > 0.0) {
        return Err(PgdError::DegenerateMode(format!(
            "spatial mode has non-positive mass or stiffness ({mx}, {kx})"
        )));
    }
    let pr = project(res, mu);
    let mut lambda = vec![0.0; nt];
    let mut omega = vec![0.0; nt];
    match scheme {
        TimeScheme::CrankNicolson => {
            let (a11, a12, a21, a22) = (h * kx, 2.0 * mx + h * cx, 2.0 * mx, -h * mx);
            let det = a11 * a22 - a12 * a21;
            for n in 0..nt - 1 {
                let mut s1 = h * (pr.load[n] + pr.load[n + 1])
                    - 2.0 * (pr.mass_rate[n + 1] - pr.mass_rate[n])
                    - h * (pr.stiffness[n] + pr.stiffness[n + 1]);
                if let Some(dr) = &pr.damping_rate {
                    s1 -= h * (dr[n] + dr[n + 1]);
                }
                let b1 = -h * kx * lambda[n] + (2.0 * mx - h * cx) * omega[n] + s1;
                let b2 = 2.0 * mx * lambda[n] + h * mx * omega[n];
                lambda[n + 1] = (b1 * a22 - a12 * b2) / det;
                omega[n + 1] = (a11 * b2 - a21 * b1) / det;
            }
            check_finite(&lambda)?;
            Ok((lambda, omega, None))
        }
        TimeScheme::Newmark => {
            let r = |n: usize| {
                let mut v = pr.load[n] - pr.mass_acceleration[n] - pr.stiffness[n];
                if let Some(dr) = &pr.damping_rate {
                    v -= dr[n];
                }
                v
            };
            let mut alpha = vec![0.0; nt];
            alpha[0] = r(0) / mx;
            let eff = mx + 0.5 * h * cx + 0.25 * h * h * kx;
            for n in 0..nt - 1 {
                let pu = lambda[n] + h * omega[n] + 0.25 * h * h * alpha[n];
                let pv = omega[n] + 0.5 * h * alpha[n];
                let a = (r(n + 1) - kx * pu - cx * pv) / eff;
                alpha[n + 1] = a;
                lambda[n + 1] = pu + 0.25 * h * h * a;
                omega[n + 1] = pv + 0.5 * h * a;
            }
            check_finite(&lambda)?;
            Ok((lambda, omega, Some(alpha)))
        }
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(PgdError::EnrichmentBreakdown("temporal solve produced non-finite values".into()))
    }
}

/// A converged (or budget-exhausted) rank-one Lagrangian mode.
#[derive(Debug, Clone)]
pub struct LagrangianMode {
    pub mu: DVector<f64>,
    pub lambda: Vec<f64>,
    pub omega: Vec<f64>,
    pub acceleration: Option<Vec<f64>>,
    pub log: EnrichmentLog,
}

/// Alternating fixed point for one new mode. `current_norm` is the
/// space-time norm of the current approximation, used by the zero-mode test.
pub fn enrich_l(
    res: &LagrangianResidual,
    scheme: TimeScheme,
    settings: &SolverSettings,
    current_norm: f64,
) -> Result<LagrangianMode> {
    let p = res.problem;
    let n = p.active;
    let h = p.dt();
    let metric = &p.ops.l2_mass;
    let (mut lambda, mut omega) = initial_temporal_guess(p.time_nodes(), p.grid.horizon());
    let mut acceleration = None;
    let mut mu = DVector::zeros(n);
    let mut log = EnrichmentLog::default();
    let mut s = settings.tolerance + 1.0;

    while log.iterations < settings.j_max && s > settings.tolerance {
        log.iterations += 1;
        let mut mu_new = spatial_solve_l(res, &lambda, &omega)?;
        let norm = p.ops.stiffness.quad(mu_new.as_slice()).max(0.0).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            log.zero = true;
            break;
        }
        mu_new /= norm;
        let (l_new, o_new, a_new) = temporal_solve_l(res, &mu_new, scheme)?;
        if l_new.iter().all(|&v| v == 0.0) {
            log.zero = true;
            mu = mu_new;
            lambda = l_new;
            omega = o_new;
            acceleration = a_new;
            break;
        }
        s = stagnation(metric, &mu_new, &l_new, &mu, &lambda, h);
        log.history.push(s);
        mu = mu_new;
        lambda = l_new;
        omega = o_new;
        acceleration = a_new;
    }
    log.stagnation = s;
    log.converged = s <= settings.tolerance;
    if !log.zero && rank_one_norm(metric, &mu, &lambda, h) <= ZERO_MODE_TOL * current_norm {
        log.zero = true;
    }
    if log.zero {
        mu.fill(0.0);
        lambda.fill(0.0);
        omega.fill(0.0);
        if let Some(a) = acceleration.as_mut() {
            a.fill(0.0);
        }
    }
    Ok(LagrangianMode {
        mu,
        lambda,
        omega,
        acceleration,
        log,
    })
}

/// Gram matrices `(K_x, M_x, M̄_x, C_x)` of the spatial basis.
fn grams(field: &SeparatedField, problem: &Problem) -> [DMatrix<f64>; 4] {
    let ops = &problem.ops;
    [
        field.gram(&ops.stiffness),
        field.gram(&ops.mass),
        field.gram(&ops.l2_mass),
        field.gram(&ops.damping),
    ]
}

/// Condition numbers of the Lagrangian update Gram matrices.
pub fn lagrangian_conditions(field: &SeparatedField, problem: &Problem) -> Result<Vec<(&'static str, f64)>> {
    let [k, m, mb, _] = grams(field, problem);
    Ok(vec![
        ("K_x", condition_number(&k)?),
        ("M_x", condition_number(&m)?),
        ("Mbar_x", condition_number(&mb)?),
    ])
}

/// Re-solve all temporal factors jointly with the spatial basis frozen.
/// On failure the field is left unchanged.
pub fn update_temporal_l(problem: &Problem, field: &mut SeparatedField, scheme: TimeScheme) -> Result<()> {
    let m = field.rank();
    if m == 0 {
        return Ok(());
    }
    let h = problem.dt();
    let nt = problem.time_nodes();
    let basis = field.basis(problem.active);
    let [kx, mx, mbx, cx] = grams(field, problem);
    let forcing = basis.tr_mul(&problem.lagrangian_forcing);

    let (lambda, omega, accel) = match scheme {
        TimeScheme::CrankNicolson => {
            let mut lhs = DMatrix::zeros(2 * m, 2 * m);
            let mut rhs = DMatrix::zeros(2 * m, 2 * m);
            lhs.view_mut((0, 0), (m, m)).copy_from(&(&kx * h));
            lhs.view_mut((0, m), (m, m)).copy_from(&(&mx * 2.0 + &cx * h));
            lhs.view_mut((m, 0), (m, m)).copy_from(&(&mbx * 2.0));
            lhs.view_mut((m, m), (m, m)).copy_from(&(&mbx * -h));
            rhs.view_mut((0, 0), (m, m)).copy_from(&(&kx * -h));
            rhs.view_mut((0, m), (m, m)).copy_from(&(&mx * 2.0 - &cx * h));
            rhs.view_mut((m, 0), (m, m)).copy_from(&(&mbx * 2.0));
            rhs.view_mut((m, m), (m, m)).copy_from(&(&mbx * h));
            let x = step_reduced(&lhs, &rhs, &forcing, None, h)?;
            let lambda = x.rows(0, m).into_owned();
            let omega = x.rows(m, m).into_owned();
            (lambda, omega, None)
        }
        TimeScheme::Newmark => {
            let kappa = condition_number(&mx)?;
            if !(kappa < 1.0 / f64::EPSILON) {
                return Err(PgdError::UpdateFailure(format!("reduced mass is singular (κ = {kappa:e})")));
            }
            let (u, v, a) = crate::reference::newmark_dense(&mx, &cx, &kx, &forcing, h)
                .map_err(|e| PgdError::UpdateFailure(e.to_string()))?;
            (u, v, Some(a))
        }
    };
    if lambda.iter().chain(omega.iter()).any(|v| !v.is_finite()) {
        return Err(PgdError::UpdateFailure("non-finite temporal factors".into()));
    }
    for i in 0..m {
        field.temporal[i] = lambda.row(i).iter().copied().collect();
        if field.rate.len() == m {
            field.rate[i] = omega.row(i).iter().copied().collect();
        }
        if let (Some(a), true) = (&accel, field.acceleration.len() == m) {
            field.acceleration[i] = a.row(i).iter().copied().collect();
        }
        debug_assert_eq!(field.temporal[i].len(), nt);
    }
    Ok(())
}

/// Reduced trapezoidal stepping `A xⁿ⁺¹ = B xⁿ + h [f₁ⁿ + f₁ⁿ⁺¹; f₂ⁿ + f₂ⁿ⁺¹]`
/// from `x⁰ = 0`; returns the state trajectory (rows: unknowns).
pub(crate) fn step_reduced(
    lhs: &DMatrix<f64>,
    rhs: &DMatrix<f64>,
    f1: &DMatrix<f64>,
    f2: Option<&DMatrix<f64>>,
    h: f64,
) -> Result<DMatrix<f64>> {
    let dim = lhs.nrows();
    let m = f1.nrows();
    let nt = f1.ncols();
    let kappa = condition_number(lhs)?;
    if !(kappa < 1.0 / f64::EPSILON) {
        return Err(PgdError::UpdateFailure(format!("step matrix is singular (κ = {kappa:e})")));
    }
    let lu = lhs.clone().lu();
    let mut x = DMatrix::zeros(dim, nt);
    let mut b = DVector::zeros(dim);
    for n in 0..nt - 1 {
        b.copy_from(&(rhs * x.column(n)));
        for i in 0..m {
            b[i] += h * (f1[(i, n)] + f1[(i, n + 1)]);
        }
        if let Some(f2) = f2 {
            for i in 0..m {
                b[m + i] += h * (f2[(i, n)] + f2[(i, n + 1)]);
            }
        }
        let next = lu
            .solve(&b)
            .ok_or_else(|| PgdError::UpdateFailure("singular step matrix".into()))?;
        x.set_column(n + 1, &next);
    }
    Ok(x)
}

/// Greedy Lagrangian PGD up to `m_max` modes. Enrichment and update failures
/// end the loop and are recorded in the report rather than returned.
pub fn run_lpgd(
    problem: &Problem,
    scheme: TimeScheme,
    settings: &SolverSettings,
    m_max: usize,
    baseline: &Baseline,
) -> Result<(SeparatedField, RunReport)> {
    settings.validate()?;
    if m_max > problem.active {
        return Err(PgdError::invalid(format!(
            "m_max = {m_max} exceeds the {} unconstrained DOFs",
            problem.active
        )));
    }
    let h = problem.dt();
    let mut field = SeparatedField::new();
    let mut res = LagrangianResidual::new(problem);
    let mut ranks = Vec::with_capacity(m_max + 1);
    let mut termination = Termination::MaxRank;

    let mut energy = Vec::new();
    let mut reference_energy = Vec::new();
    let mut record = |rank: usize, res: &LagrangianResidual, extra: RankRecord| -> Result<RankRecord> {
        let mut rec = extra;
        rec.rank = rank;
        let q = problem.embed_displacement(&res.displacement)?;
        let v = problem.embed_velocity(&res.rate)?;
        let pm = problem.momentum_from_velocity(&v)?;
        if let Some(cmp) = baseline.measure(problem, &mut rec, &q, &pm, &v, EnergyKind::Lagrangian)? {
            energy = cmp.energy;
            reference_energy = cmp.reference_energy;
        }
        Ok(rec)
    };

    ranks.push(record(0, &res, RankRecord::default())?);
    let full_norm = |res: &LagrangianResidual| -> Result<f64> {
        let q = problem.embed_displacement(&res.displacement)?;
        crate::metrics::spacetime_norm(&q, &problem.full_ops.l2_mass, h)
    };

    for m in 1..=m_max {
        let current = full_norm(&res)?;
        let mode = match enrich_l(&res, scheme, settings, current) {
            Ok(mode) => mode,
            Err(e) if e.is_solver_failure() => {
                termination = Termination::Failure {
                    rank: m,
                    message: e.to_string(),
                };
                break;
            }
            Err(e) => return Err(e),
        };
        if mode.log.zero {
            termination = Termination::ZeroEnrichment { rank: m };
            break;
        }
        res.add(&mode);
        let log = mode.log.clone();
        field.push(
            mode.mu,
            mode.lambda,
            Some(mode.omega),
            mode.acceleration,
        );
        if let Err(e) = field.orthonormalize_newest(&problem.ops.stiffness) {
            termination = Termination::Failure {
                rank: m,
                message: e.to_string(),
            };
            field.spatial.pop();
            field.temporal.pop();
            field.rate.pop();
            field.acceleration.pop();
            break;
        }
        let mut rec = RankRecord {
            log: Some(log),
            ..RankRecord::default()
        };
        rec.conditions = lagrangian_conditions(&field, problem)?;
        if settings.update {
            let mut trial = field.clone();
            match update_temporal_l(problem, &mut trial, scheme) {
                Ok(()) => {
                    field = trial;
                    res = LagrangianResidual::from_field(problem, &field);
                }
                Err(e) => rec.update_error = Some(e.to_string()),
            }
        }
        ranks.push(record(m, &res, rec)?);
    }

    Ok((
        field,
        RunReport {
            method: scheme.method(),
            ranks,
            energy,
            reference_energy,
            termination,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{Material, RightBoundary, Scenario, Signal};
    use crate::reference::{solve_lagrangian_cn, solve_newmark};

    fn small(elements: usize, steps: usize, damping: f64) -> Scenario {
        let mat = Material::new(220e9, 1e-3, 7000.0, damping).unwrap();
        let mut sc = Scenario::quiescent(mat, 0.2, elements, 1.15e-4, steps);
        sc.right = RightBoundary::Traction(Signal::RampCosine {
            amplitude: 1e6,
            omega: 4.4e4,
            cutoff: Some(0.5e-4),
        });
        sc
    }

    fn eps_q(report: &RunReport) -> f64 {
        report.ranks.last().unwrap().eps_q.unwrap()
    }

    #[test]
    fn full_rank_recovers_reference() {
        let settings = SolverSettings::default();
        for damping in [0.0, 15e3] {
            let p = Problem::new(&small(6, 40, damping)).unwrap();
            let lcn = solve_lagrangian_cn(&p).unwrap();
            let nm = solve_newmark(&p).unwrap();
            let (field, r1) =
                run_lpgd(&p, TimeScheme::CrankNicolson, &settings, 6, &Baseline::reference(&lcn)).unwrap();
            let (_, r2) = run_lpgd(&p, TimeScheme::Newmark, &settings, 6, &Baseline::reference(&nm)).unwrap();
            assert!(eps_q(&r1) < 1e-9, "{}", eps_q(&r1));
            assert!(eps_q(&r2) < 1e-9, "{}", eps_q(&r2));
            let k = field.gram(&p.ops.stiffness);
            assert!((k - DMatrix::identity(6, 6)).amax() < 1e-10);
        }
    }

    #[test]
    fn single_dof_is_exact_at_rank_one() {
        let p = Problem::new(&small(1, 30, 0.0)).unwrap();
        let lcn = solve_lagrangian_cn(&p).unwrap();
        let (_, r) = run_lpgd(&p, TimeScheme::CrankNicolson, &SolverSettings::default(), 1, &Baseline::reference(&lcn))
            .unwrap();
        assert!(eps_q(&r) < 1e-12);
    }

    #[test]
    fn errors_are_invariant_to_load_scale() {
        let settings = SolverSettings::default();
        let run = |scale: f64| {
            let mut sc = small(8, 60, 0.0);
            sc.right = RightBoundary::Traction(Signal::RampCosine {
                amplitude: 1e6 * scale,
                omega: 4.4e4,
                cutoff: Some(0.5e-4),
            });
            let p = Problem::new(&sc).unwrap();
            let lcn = solve_lagrangian_cn(&p).unwrap();
            let (_, r) = run_lpgd(&p, TimeScheme::CrankNicolson, &settings, 3, &Baseline::reference(&lcn)).unwrap();
            r.ranks.iter().map(|x| x.eps_q.unwrap()).collect::<Vec<_>>()
        };
        let a = run(1.0);
        let b = run(1e-3);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-6 * x.max(1e-12), "{x} vs {y}");
        }
    }

    #[test]
    fn zero_problem_gives_zero_enrichment() {
        let mut sc = small(4, 10, 0.0);
        sc.right = RightBoundary::Free;
        let p = Problem::new(&sc).unwrap();
        let mode = enrich_l(&LagrangianResidual::new(&p), TimeScheme::CrankNicolson, &SolverSettings::default(), 0.0)
            .unwrap();
        assert!(mode.log.zero);
        let (field, r) = run_lpgd(&p, TimeScheme::Newmark, &SolverSettings::default(), 2, &Baseline::default()).unwrap();
        assert_eq!(r.termination, Termination::ZeroEnrichment { rank: 1 });
        assert!(field.is_empty());
    }

    #[test]
    fn m_max_above_dofs_is_rejected() {
        let p = Problem::new(&small(3, 10, 0.0)).unwrap();
        let err = run_lpgd(&p, TimeScheme::CrankNicolson, &SolverSettings::default(), 4, &Baseline::default());
        assert!(matches!(err, Err(PgdError::InvalidArgument(_))));
    }

    #[test]
    fn update_reproduces_single_mode_solve() {
        let p = Problem::new(&small(8, 50, 15e3)).unwrap();
        let res = LagrangianResidual::new(&p);
        for scheme in [TimeScheme::CrankNicolson, TimeScheme::Newmark] {
            let mode = enrich_l(&res, scheme, &SolverSettings::default(), 0.0).unwrap();
            let mut field = SeparatedField::new();
            field.push(mode.mu, mode.lambda, Some(mode.omega), mode.acceleration);
            field.orthonormalize_newest(&p.ops.stiffness).unwrap();
            let (lambda, _, _) = temporal_solve_l(&res, &field.spatial[0], scheme).unwrap();
            update_temporal_l(&p, &mut field, scheme).unwrap();
            let scale = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in field.temporal[0].iter().zip(&lambda) {
                assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }
}
