//! Hamiltonian PGD: separated displacement `q = q₀ + Σ μᵢ λᵢ` and momentum
//! `p = p₀ + Σ νᵢ ωᵢ` enriched together.

use nalgebra::{DMatrix, DVector};

use crate::error::{PgdError, Result};
use crate::fem::problem::Problem;
use crate::fem::time_integrals::{product_unchecked, product_weights, rate_product_unchecked, rate_weights};
use crate::linalg::{condition_number, SymTridiagonal};
use crate::metrics::{spacetime_norm, Baseline, EnergyKind, RankRecord, RunReport, Termination};
use crate::pgd::lagrangian::step_reduced;
use crate::pgd::separated::{rank_one_norm, stagnation, SeparatedField};
use crate::pgd::{initial_temporal_guess, EnrichmentLog, Method, SolverSettings, ZERO_MODE_TOL};
use crate::reference::cn::interleave;

/// Displacement modes `(μ, λ)` and momentum modes `(ν, ω)` of equal rank.
#[derive(Debug, Clone, Default)]
pub struct HamiltonianState {
    pub q: SeparatedField,
    pub p: SeparatedField,
}

impl HamiltonianState {
    pub fn rank(&self) -> usize {
        self.q.rank()
    }

    /// Cross Gram matrix `[μᵢᵀ A νⱼ]`.
    pub fn cross_gram(&self, a: &SymTridiagonal) -> DMatrix<f64> {
        let m = self.rank();
        DMatrix::from_fn(m, m, |i, j| {
            a.bilinear(self.q.spatial[i].as_slice(), self.p.spatial[j].as_slice())
        })
    }
}

/// Dense sums of the modes found so far.
#[derive(Debug, Clone)]
pub struct HamiltonianResidual<'a> {
    pub problem: &'a Problem,
    /// `Σ μᵢ λᵢ`
    pub displacement: DMatrix<f64>,
    /// `Σ νᵢ ωᵢ`
    pub momentum: DMatrix<f64>,
}

impl<'a> HamiltonianResidual<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        let (n, nt) = (problem.active, problem.time_nodes());
        Self {
            problem,
            displacement: DMatrix::zeros(n, nt),
            momentum: DMatrix::zeros(n, nt),
        }
    }

    pub fn from_state(problem: &'a Problem, state: &HamiltonianState) -> Self {
        let (n, nt) = (problem.active, problem.time_nodes());
        Self {
            problem,
            displacement: state.q.dense(n, nt),
            momentum: state.p.dense(n, nt),
        }
    }

    fn add(&mut self, mode: &HamiltonianMode) {
        for k in 0..mode.lambda.len() {
            self.displacement.column_mut(k).axpy(mode.lambda[k], &mode.mu, 1.0);
            self.momentum.column_mut(k).axpy(mode.omega[k], &mode.nu, 1.0);
        }
    }

    /// `R_μ = ∫ G λ − M̄ ∫ Ṗ λ − K ∫ W λ − C̃ ∫ P λ`
    fn residual_mu(&self, lambda: &[f64]) -> DVector<f64> {
        let p = self.problem;
        let ops = &p.ops;
        let wl = DVector::from_vec(product_weights(lambda, p.dt()));
        let rl = DVector::from_vec(rate_weights(lambda));
        let mut r = &p.hamiltonian_forcing * &wl;
        r -= ops.l2_mass.mul_vec(&(&self.momentum * &rl));
        r -= ops.stiffness.mul_vec(&(&self.displacement * &wl));
        if ops.is_damped() {
            r -= ops.momentum_damping.mul_vec(&(&self.momentum * &wl));
        }
        r
    }

    /// `R_ν = −∫ k ω − M̄̄ ∫ P ω + M̄ ∫ Ẇ ω`
    fn residual_nu(&self, omega: &[f64]) -> DVector<f64> {
        let p = self.problem;
        let ops = &p.ops;
        let wo = DVector::from_vec(product_weights(omega, p.dt()));
        let ro = DVector::from_vec(rate_weights(omega));
        let mut r = -(&p.kinematic_forcing * &wo);
        r -= ops.compliance_mass.mul_vec(&(&self.momentum * &wo));
        r += ops.l2_mass.mul_vec(&(&self.displacement * &ro));
        r
    }
}

/// Time integrals of a temporal pair.
struct TimeCoefficients {
    /// `∫ λ²`
    k: f64,
    /// `∫ λ̇ ω`
    c: f64,
    /// `∫ ω̇ λ = ω(T)λ(T) − ∫ λ̇ ω`
    d: f64,
    /// `∫ ω²`
    m: f64,
    /// `∫ ω λ`
    e: f64,
}

fn time_coefficients(lambda: &[f64], omega: &[f64], h: f64) -> TimeCoefficients {
    let last = lambda.len() - 1;
    let c = rate_product_unchecked(lambda, omega);
    TimeCoefficients {
        k: product_unchecked(lambda, lambda, h),
        c,
        d: omega[last] * lambda[last] - c,
        m: product_unchecked(omega, omega, h),
        e: product_unchecked(omega, lambda, h),
    }
}

fn check_lengths(p: &Problem, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != p.time_nodes() || b.len() != p.time_nodes() {
        return Err(PgdError::invalid("temporal mode length does not match the time grid"));
    }
    Ok(())
}

fn finite_vec(v: &DVector<f64>, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(PgdError::EnrichmentBreakdown(format!("{what} produced non-finite values")))
    }
}

/// Coupled spatial problem
/// `[[k K, d M̄ + e C̃], [−c M̄, m M̄̄]] [μ; ν] = [R_μ; R_ν]`.
pub fn spatial_solve_h(res: &HamiltonianResidual, lambda: &[f64], omega: &[f64]) -> Result<(DVector<f64>, DVector<f64>)> {
    let p = res.problem;
    check_lengths(p, lambda, omega)?;
    let ops = &p.ops;
    let t = time_coefficients(lambda, omega, p.dt());
    if !(t.k > 0.0 && t.m > 0.0) {
        return Err(PgdError::EnrichmentBreakdown("temporal modes vanished".into()));
    }
    let a11 = ops.stiffness.scaled(t.k);
    let a12 = SymTridiagonal::combine(&[(t.d, &ops.l2_mass), (t.e, &ops.momentum_damping)]);
    let a21 = ops.l2_mass.scaled(-t.c);
    let a22 = ops.compliance_mass.scaled(t.m);
    let lu = interleave([&a11, &a12, &a21, &a22])
        .factor()
        .map_err(|e| PgdError::EnrichmentBreakdown(format!("spatial system: {e}")))?;
    let rm = res.residual_mu(lambda);
    let rn = res.residual_nu(omega);
    let n = p.active;
    let mut b = vec![0.0; 2 * n];
    for i in 0..n {
        b[2 * i] = rm[i];
        b[2 * i + 1] = rn[i];
    }
    lu.solve_in_place(&mut b);
    let mu = DVector::from_fn(n, |i, _| b[2 * i]);
    let nu = DVector::from_fn(n, |i, _| b[2 * i + 1]);
    finite_vec(&mu, "spatial solve")?;
    finite_vec(&nu, "spatial solve")?;
    Ok((mu, nu))
}

/// Switch operator for the momentum field with `(μ, λ)` frozen:
/// `m M̄̄ ν = c M̄ μ + R_ν`.
pub fn switch_spatial_p(res: &HamiltonianResidual, mu: &DVector<f64>, lambda: &[f64], omega: &[f64]) -> Result<DVector<f64>> {
    let p = res.problem;
    check_lengths(p, lambda, omega)?;
    let t = time_coefficients(lambda, omega, p.dt());
    if !(t.m > 0.0) {
        return Err(PgdError::DegenerateMode("momentum temporal mode vanished".into()));
    }
    let rhs = p.ops.l2_mass.mul_vec(mu) * t.c + res.residual_nu(omega);
    let nu = p.ops.compliance_mass.scaled(t.m).factor()?.solve(&rhs);
    finite_vec(&nu, "momentum switch")?;
    Ok(nu)
}

/// Switch operator for the displacement field with `(ν, ω)` frozen:
/// `k K μ = R_μ − (d M̄ + e C̃) ν`.
pub fn switch_spatial_q(res: &HamiltonianResidual, nu: &DVector<f64>, lambda: &[f64], omega: &[f64]) -> Result<DVector<f64>> {
    let p = res.problem;
    check_lengths(p, lambda, omega)?;
    let ops = &p.ops;
    let t = time_coefficients(lambda, omega, p.dt());
    if !(t.k > 0.0) {
        return Err(PgdError::DegenerateMode("displacement temporal mode vanished".into()));
    }
    let coupling = SymTridiagonal::combine(&[(t.d, &ops.l2_mass), (t.e, &ops.momentum_damping)]);
    let rhs = res.residual_mu(lambda) - coupling.mul_vec(nu);
    let mu = ops.stiffness.scaled(t.k).factor()?.solve(&rhs);
    finite_vec(&mu, "displacement switch")?;
    Ok(mu)
}

/// Spatial scalars and per-interval residual sources of the temporal problem.
struct TemporalData {
    kx: f64,
    cx: f64,
    mx: f64,
    gamma: f64,
    s1: Vec<f64>,
    s2: Vec<f64>,
}

fn temporal_data(res: &HamiltonianResidual, mu: &DVector<f64>, nu: &DVector<f64>) -> TemporalData {
    let p = res.problem;
    let ops = &p.ops;
    let h = p.dt();
    let nt = p.time_nodes();
    let mbar_mu = ops.l2_mass.mul_vec(mu);
    let g = p.hamiltonian_forcing.tr_mul(mu);
    let pm = res.momentum.tr_mul(&mbar_mu);
    let wk = res.displacement.tr_mul(&ops.stiffness.mul_vec(mu));
    let pc = ops
        .is_damped()
        .then(|| res.momentum.tr_mul(&ops.momentum_damping.mul_vec(mu)));
    let kin = p.kinematic_forcing.tr_mul(nu);
    let wm = res.displacement.tr_mul(&ops.l2_mass.mul_vec(nu));
    let pmbb = res.momentum.tr_mul(&ops.compliance_mass.mul_vec(nu));
    let mut s1 = vec![0.0; nt - 1];
    let mut s2 = vec![0.0; nt - 1];
    for n in 0..nt - 1 {
        s1[n] = h * (g[n] + g[n + 1]) - 2.0 * (pm[n + 1] - pm[n]) - h * (wk[n] + wk[n + 1]);
        if let Some(pc) = &pc {
            s1[n] -= h * (pc[n] + pc[n + 1]);
        }
        s2[n] = h * (kin[n] + kin[n + 1]) - 2.0 * (wm[n + 1] - wm[n]) + h * (pmbb[n] + pmbb[n + 1]);
    }
    TemporalData {
        kx: ops.stiffness.quad(mu.as_slice()),
        cx: mbar_mu.dot(nu),
        mx: ops.compliance_mass.quad(nu.as_slice()),
        gamma: ops.momentum_damping.bilinear(mu.as_slice(), nu.as_slice()),
        s1,
        s2,
    }
}

fn finite_series(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(PgdError::EnrichmentBreakdown("temporal solve produced non-finite values".into()))
    }
}

/// Coupled temporal problem, stepping
/// `[[h kₓ, 2cₓ + hγ], [2cₓ, −h mₓ]] [λ; ω]ⁿ⁺¹ = [[−h kₓ, 2cₓ − hγ], [2cₓ, h mₓ]] [λ; ω]ⁿ + [S₁ⁿ; S₂ⁿ]`.
pub fn temporal_solve_h(res: &HamiltonianResidual, mu: &DVector<f64>, nu: &DVector<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = res.problem.dt();
    let nt = res.problem.time_nodes();
    let d = temporal_data(res, mu, nu);
    if !(d.kx > 0.0 && d.mx > 0.0) {
        return Err(PgdError::DegenerateMode(format!(
            "non-positive spatial coefficients (k = {}, m = {})",
            d.kx, d.mx
        )));
    }
    let (a11, a12, a21, a22) = (h * d.kx, 2.0 * d.cx + h * d.gamma, 2.0 * d.cx, -h * d.mx);
    let det = a11 * a22 - a12 * a21;
    if det == 0.0 || !det.is_finite() {
        return Err(PgdError::DegenerateMode("singular temporal step matrix".into()));
    }
    let mut lambda = vec![0.0; nt];
    let mut omega = vec![0.0; nt];
    for n in 0..nt - 1 {
        let b1 = -h * d.kx * lambda[n] + (2.0 * d.cx - h * d.gamma) * omega[n] + d.s1[n];
        let b2 = 2.0 * d.cx * lambda[n] + h * d.mx * omega[n] + d.s2[n];
        lambda[n + 1] = (b1 * a22 - a12 * b2) / det;
        omega[n + 1] = (a11 * b2 - a21 * b1) / det;
    }
    finite_series(&lambda)?;
    finite_series(&omega)?;
    Ok((lambda, omega))
}

/// Momentum temporal switch with `(μ, λ)` frozen:
/// `h mₓ ωⁿ⁺¹ = −h mₓ ωⁿ + 2cₓ(λⁿ⁺¹ − λⁿ) − S₂ⁿ`.
pub fn switch_temporal_p(res: &HamiltonianResidual, mu: &DVector<f64>, lambda: &[f64], nu: &DVector<f64>) -> Result<Vec<f64>> {
    let h = res.problem.dt();
    let d = temporal_data(res, mu, nu);
    if !(d.mx > 0.0) {
        return Err(PgdError::DegenerateMode("momentum spatial mode vanished".into()));
    }
    let mut omega = vec![0.0; lambda.len()];
    for n in 0..lambda.len() - 1 {
        omega[n + 1] = (-h * d.mx * omega[n] + 2.0 * d.cx * (lambda[n + 1] - lambda[n]) - d.s2[n]) / (h * d.mx);
    }
    finite_series(&omega)?;
    Ok(omega)
}

/// Displacement temporal switch with `(ν, ω)` frozen:
/// `h kₓ λⁿ⁺¹ = −h kₓ λⁿ − 2cₓ(ωⁿ⁺¹ − ωⁿ) − hγ(ωⁿ + ωⁿ⁺¹) + S₁ⁿ`.
pub fn switch_temporal_q(res: &HamiltonianResidual, mu: &DVector<f64>, nu: &DVector<f64>, omega: &[f64]) -> Result<Vec<f64>> {
    let h = res.problem.dt();
    let d = temporal_data(res, mu, nu);
    if !(d.kx > 0.0) {
        return Err(PgdError::DegenerateMode("displacement spatial mode vanished".into()));
    }
    let mut lambda = vec![0.0; omega.len()];
    for n in 0..omega.len() - 1 {
        lambda[n + 1] = (-h * d.kx * lambda[n] - 2.0 * d.cx * (omega[n + 1] - omega[n])
            - h * d.gamma * (omega[n] + omega[n + 1])
            + d.s1[n])
            / (h * d.kx);
    }
    finite_series(&lambda)?;
    Ok(lambda)
}

/// A new mode quadruple. `zero_q` / `zero_p` flag fields whose mode vanished.
#[derive(Debug, Clone)]
pub struct HamiltonianMode {
    pub mu: DVector<f64>,
    pub lambda: Vec<f64>,
    pub nu: DVector<f64>,
    pub omega: Vec<f64>,
    pub zero_q: bool,
    pub zero_p: bool,
    pub log: EnrichmentLog,
}

fn normalize(v: &mut DVector<f64>, metric: &SymTridiagonal) -> bool {
    let n = metric.quad(v.as_slice()).max(0.0).sqrt();
    if n == 0.0 || !n.is_finite() {
        v.fill(0.0);
        false
    } else {
        *v /= n;
        true
    }
}

/// Adaptive fixed point: coupled iterations while both fields move, half-size
/// switch iterations once one of them has stagnated. `current_norms` are the
/// space-time norms of the current displacement and momentum approximations.
pub fn enrich_h(
    res: &HamiltonianResidual,
    settings: &SolverSettings,
    current_norms: (f64, f64),
) -> Result<HamiltonianMode> {
    let p = res.problem;
    let n = p.active;
    let h = p.dt();
    let metric = &p.ops.l2_mass;
    let eps = settings.tolerance;
    let (mut lambda, mut omega) = initial_temporal_guess(p.time_nodes(), p.grid.horizon());
    let mut mu = DVector::zeros(n);
    let mut nu = DVector::zeros(n);
    let mut log = EnrichmentLog::default();
    let (mut sq, mut sp) = (eps + 1.0, eps + 1.0);
    let (mut zero_q, mut zero_p) = (false, false);

    while log.iterations < settings.j_max && (sq > eps || sp > eps) {
        log.iterations += 1;
        if sq < eps {
            log.decoupled_iterations += 1;
            let mut nu_new = switch_spatial_p(res, &mu, &lambda, &omega)?;
            if !normalize(&mut nu_new, &p.ops.compliance_mass) {
                zero_p = true;
                nu.fill(0.0);
                omega.fill(0.0);
                sp = 0.0;
                break;
            }
            let o_new = switch_temporal_p(res, &mu, &lambda, &nu_new)?;
            sp = stagnation(metric, &nu_new, &o_new, &nu, &omega, h);
            log.history_p.push(sp);
            nu = nu_new;
            omega = o_new;
        } else if sp < eps {
            log.decoupled_iterations += 1;
            let mut mu_new = switch_spatial_q(res, &nu, &lambda, &omega)?;
            if !normalize(&mut mu_new, &p.ops.stiffness) {
                zero_q = true;
                mu.fill(0.0);
                lambda.fill(0.0);
                sq = 0.0;
                break;
            }
            let l_new = switch_temporal_q(res, &mu_new, &nu, &omega)?;
            sq = stagnation(metric, &mu_new, &l_new, &mu, &lambda, h);
            log.history.push(sq);
            mu = mu_new;
            lambda = l_new;
        } else {
            let (mut mu_new, mut nu_new) = spatial_solve_h(res, &lambda, &omega)?;
            let ok_q = normalize(&mut mu_new, &p.ops.stiffness);
            let ok_p = normalize(&mut nu_new, &p.ops.compliance_mass);
            match (ok_q, ok_p) {
                (false, false) => {
                    zero_q = true;
                    zero_p = true;
                    break;
                }
                (true, true) => {
                    let (l_new, o_new) = temporal_solve_h(res, &mu_new, &nu_new)?;
                    sq = stagnation(metric, &mu_new, &l_new, &mu, &lambda, h);
                    sp = stagnation(metric, &nu_new, &o_new, &nu, &omega, h);
                    log.history.push(sq);
                    log.history_p.push(sp);
                    mu = mu_new;
                    nu = nu_new;
                    lambda = l_new;
                    omega = o_new;
                }
                (true, false) => {
                    // momentum mode vanished: keep a zero p-mode and finish q alone
                    zero_p = true;
                    nu.fill(0.0);
                    omega.fill(0.0);
                    let l_new = switch_temporal_q(res, &mu_new, &nu, &omega)?;
                    sq = stagnation(metric, &mu_new, &l_new, &mu, &lambda, h);
                    sp = 0.0;
                    log.history.push(sq);
                    mu = mu_new;
                    lambda = l_new;
                }
                (false, true) => {
                    zero_q = true;
                    mu.fill(0.0);
                    lambda.fill(0.0);
                    let o_new = switch_temporal_p(res, &mu, &lambda, &nu_new)?;
                    sp = stagnation(metric, &nu_new, &o_new, &nu, &omega, h);
                    sq = 0.0;
                    log.history_p.push(sp);
                    nu = nu_new;
                    omega = o_new;
                }
            }
        }
    }
    log.stagnation = sq;
    log.stagnation_p = Some(sp);
    log.converged = sq <= eps && sp <= eps;
    if !zero_q && rank_one_norm(metric, &mu, &lambda, h) <= ZERO_MODE_TOL * current_norms.0 {
        zero_q = true;
    }
    if !zero_p && rank_one_norm(metric, &nu, &omega, h) <= ZERO_MODE_TOL * current_norms.1 {
        zero_p = true;
    }
    if zero_q {
        mu.fill(0.0);
        lambda.fill(0.0);
    }
    if zero_p {
        nu.fill(0.0);
        omega.fill(0.0);
    }
    log.zero = zero_q && zero_p;
    Ok(HamiltonianMode {
        mu,
        lambda,
        nu,
        omega,
        zero_q,
        zero_p,
        log,
    })
}

/// Condition numbers of the Hamiltonian update Gram matrices.
pub fn hamiltonian_conditions(state: &HamiltonianState, problem: &Problem) -> Result<Vec<(&'static str, f64)>> {
    let ops = &problem.ops;
    Ok(vec![
        ("K_x", condition_number(&state.q.gram(&ops.stiffness))?),
        ("M_x", condition_number(&state.p.gram(&ops.compliance_mass))?),
        ("C_x", condition_number(&state.cross_gram(&ops.l2_mass))?),
    ])
}

/// Joint re-solve of all `(λᵢ, ωᵢ)` with both spatial bases frozen.
/// On failure the state is left unchanged.
pub fn update_temporal_h(problem: &Problem, state: &mut HamiltonianState) -> Result<()> {
    let m = state.rank();
    if m == 0 {
        return Ok(());
    }
    let ops = &problem.ops;
    let h = problem.dt();
    let kx = state.q.gram(&ops.stiffness);
    let mx = state.p.gram(&ops.compliance_mass);
    let cx = state.cross_gram(&ops.l2_mass);
    let gx = state.cross_gram(&ops.momentum_damping);
    let mut lhs = DMatrix::zeros(2 * m, 2 * m);
    let mut rhs = DMatrix::zeros(2 * m, 2 * m);
    lhs.view_mut((0, 0), (m, m)).copy_from(&(&kx * h));
    lhs.view_mut((0, m), (m, m)).copy_from(&(&cx * 2.0 + &gx * h));
    lhs.view_mut((m, 0), (m, m)).copy_from(&(cx.transpose() * 2.0));
    lhs.view_mut((m, m), (m, m)).copy_from(&(&mx * -h));
    rhs.view_mut((0, 0), (m, m)).copy_from(&(&kx * -h));
    rhs.view_mut((0, m), (m, m)).copy_from(&(&cx * 2.0 - &gx * h));
    rhs.view_mut((m, 0), (m, m)).copy_from(&(cx.transpose() * 2.0));
    rhs.view_mut((m, m), (m, m)).copy_from(&(&mx * h));
    let f1 = state.q.basis(problem.active).tr_mul(&problem.hamiltonian_forcing);
    let f2 = state.p.basis(problem.active).tr_mul(&problem.kinematic_forcing);
    let x = step_reduced(&lhs, &rhs, &f1, Some(&f2), h)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(PgdError::UpdateFailure("non-finite temporal factors".into()));
    }
    for i in 0..m {
        state.q.temporal[i] = x.row(i).iter().copied().collect();
        state.p.temporal[i] = x.row(m + i).iter().copied().collect();
    }
    Ok(())
}

/// Greedy Hamiltonian PGD up to `m_max` modes.
pub fn run_hpgd(
    problem: &Problem,
    settings: &SolverSettings,
    m_max: usize,
    baseline: &Baseline,
) -> Result<(HamiltonianState, RunReport)> {
    settings.validate()?;
    if m_max > problem.active {
        return Err(PgdError::invalid(format!(
            "m_max = {m_max} exceeds the {} unconstrained DOFs",
            problem.active
        )));
    }
    let h = problem.dt();
    let mut state = HamiltonianState::default();
    let mut res = HamiltonianResidual::new(problem);
    let mut ranks = Vec::with_capacity(m_max + 1);
    let mut termination = Termination::MaxRank;
    let mut energy = Vec::new();
    let mut reference_energy = Vec::new();

    let mut record = |rank: usize, res: &HamiltonianResidual, extra: RankRecord| -> Result<RankRecord> {
        let mut rec = extra;
        rec.rank = rank;
        let q = problem.embed_displacement(&res.displacement)?;
        let pm = problem.embed_momentum(&res.momentum)?;
        if let Some(cmp) = baseline.measure(problem, &mut rec, &q, &pm, &pm, EnergyKind::Hamiltonian)? {
            energy = cmp.energy;
            reference_energy = cmp.reference_energy;
        }
        Ok(rec)
    };
    ranks.push(record(0, &res, RankRecord::default())?);

    for m in 1..=m_max {
        let g = &problem.full_ops.l2_mass;
        let norms = (
            spacetime_norm(&problem.embed_displacement(&res.displacement)?, g, h)?,
            spacetime_norm(&problem.embed_momentum(&res.momentum)?, g, h)?,
        );
        let mode = match enrich_h(&res, settings, norms) {
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
        let mut next = state.clone();
        next.q.push(mode.mu, mode.lambda, None, None);
        next.p.push(mode.nu, mode.omega, None, None);
        let ortho = next
            .q
            .orthonormalize_newest(&problem.ops.stiffness)
            .and_then(|_| next.p.orthonormalize_newest(&problem.ops.compliance_mass));
        if let Err(e) = ortho {
            termination = Termination::Failure {
                rank: m,
                message: e.to_string(),
            };
            break;
        }
        state = next;
        let mut rec = RankRecord {
            log: Some(log),
            ..RankRecord::default()
        };
        rec.conditions = hamiltonian_conditions(&state, problem)?;
        if settings.update {
            let mut trial = state.clone();
            match update_temporal_h(problem, &mut trial) {
                Ok(()) => {
                    state = trial;
                    res = HamiltonianResidual::from_state(problem, &state);
                }
                Err(e) => rec.update_error = Some(e.to_string()),
            }
        }
        ranks.push(record(m, &res, rec)?);
    }

    Ok((
        state,
        RunReport {
            method: Method::Hpgd,
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
    use crate::reference::solve_hamiltonian_cn;

    fn small(elements: usize, steps: usize, damping: f64, dirichlet: bool) -> Scenario {
        let mat = Material::new(220e9, 1e-3, 7000.0, damping).unwrap();
        let mut sc = Scenario::quiescent(mat, 0.2, elements, 1.15e-4, steps);
        let ramp = |a, cutoff| Signal::RampCosine {
            amplitude: a,
            omega: 4.4e4,
            cutoff,
        };
        sc.right = if dirichlet {
            RightBoundary::Displacement(ramp(5e-3, None))
        } else {
            RightBoundary::Traction(ramp(1e6, Some(0.5e-4)))
        };
        sc
    }

    #[test]
    fn full_rank_recovers_reference() {
        for (damping, dirichlet) in [(0.0, false), (15e3, false), (0.0, true)] {
            let sc = small(6, 40, damping, dirichlet);
            let p = Problem::new(&sc).unwrap();
            let hcn = solve_hamiltonian_cn(&p).unwrap();
            let (state, r) = run_hpgd(&p, &SolverSettings::default(), p.active, &Baseline::reference(&hcn)).unwrap();
            let last = r.ranks.last().unwrap();
            assert!(last.eps_q.unwrap() < 1e-9, "{:?}", last.eps_q);
            assert!(last.eps_p.unwrap() < 1e-9, "{:?}", last.eps_p);
            let m = state.rank();
            assert!((state.q.gram(&p.ops.stiffness) - DMatrix::identity(m, m)).amax() < 1e-10);
            assert!((state.p.gram(&p.ops.compliance_mass) - DMatrix::identity(m, m)).amax() < 1e-10);
        }
    }

    #[test]
    fn conditions_stay_at_one() {
        let p = Problem::new(&small(10, 60, 0.0, false)).unwrap();
        let (_, r) = run_hpgd(&p, &SolverSettings::default(), 6, &Baseline::default()).unwrap();
        for rec in r.ranks.iter().skip(1) {
            for (name, k) in &rec.conditions {
                if *name != "C_x" {
                    assert!((k - 1.0).abs() < 1e-10, "{name}: {k}");
                }
            }
        }
    }

    #[test]
    fn zero_problem_gives_zero_enrichment() {
        let mut sc = small(4, 10, 0.0, false);
        sc.right = RightBoundary::Free;
        let p = Problem::new(&sc).unwrap();
        let mode = enrich_h(&HamiltonianResidual::new(&p), &SolverSettings::default(), (0.0, 0.0)).unwrap();
        assert!(mode.log.zero && mode.zero_q && mode.zero_p);
        let (state, r) = run_hpgd(&p, &SolverSettings::default(), 2, &Baseline::default()).unwrap();
        assert_eq!(r.termination, Termination::ZeroEnrichment { rank: 1 });
        assert_eq!(state.rank(), 0);
    }

    #[test]
    fn update_reproduces_single_mode_solve() {
        let p = Problem::new(&small(8, 50, 15e3, false)).unwrap();
        let res = HamiltonianResidual::new(&p);
        let mode = enrich_h(&res, &SolverSettings::default(), (0.0, 0.0)).unwrap();
        let mut state = HamiltonianState::default();
        state.q.push(mode.mu, mode.lambda, None, None);
        state.p.push(mode.nu, mode.omega, None, None);
        state.q.orthonormalize_newest(&p.ops.stiffness).unwrap();
        state.p.orthonormalize_newest(&p.ops.compliance_mass).unwrap();
        let (lambda, omega) = temporal_solve_h(&res, &state.q.spatial[0], &state.p.spatial[0]).unwrap();
        update_temporal_h(&p, &mut state).unwrap();
        for (got, want) in [(&state.q.temporal[0], &lambda), (&state.p.temporal[0], &omega)] {
            let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in got.iter().zip(want) {
                assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn switch_solves_match_coupled_fixed_point() {
        // at a converged coupled mode, each half-size solve returns the same factors
        let p = Problem::new(&small(8, 50, 0.0, false)).unwrap();
        let res = HamiltonianResidual::new(&p);
        let mode = enrich_h(&res, &SolverSettings::default(), (0.0, 0.0)).unwrap();
        assert!(mode.log.converged);
        let omega = switch_temporal_p(&res, &mode.mu, &mode.lambda, &mode.nu).unwrap();
        let lambda = switch_temporal_q(&res, &mode.mu, &mode.nu, &mode.omega).unwrap();
        let gap = |a: &[f64], b: &[f64]| {
            let s = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / s
        };
        assert!(gap(&omega, &mode.omega) < 1e-10);
        assert!(gap(&lambda, &mode.lambda) < 1e-10);
    }
}
