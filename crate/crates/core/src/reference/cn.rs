use nalgebra::DMatrix;

use crate::error::{PgdError, Result};
use crate::fem::problem::Problem;
use crate::linalg::{col, BandMatrix, BandedLu, SymTridiagonal};
use crate::reference::{TrajectoryKind, TrajectorySet};

/// Interleave a 2×2 block operator of tridiagonal blocks into a band matrix:
/// unknown `2i` is the first field at DOF `i`, `2i + 1` the second.
pub(crate) fn interleave(blocks: [&SymTridiagonal; 4]) -> BandMatrix {
    let n = blocks[0].dim();
    let mut band = BandMatrix::zeros(2 * n, 3, 3);
    for (b, block) in blocks.iter().enumerate() {
        let (ro, co) = (b / 2, b % 2);
        for i in 0..n {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            for j in lo..=hi {
                let v = block.get(i, j);
                if v != 0.0 {
                    band.add(2 * i + ro, 2 * j + co, v);
                }
            }
        }
    }
    band
}

/// Constant-coefficient two-field trapezoidal stepper
/// `A xⁿ⁺¹ = B xⁿ + [s₁ⁿ; s₂ⁿ]` starting from `x⁰ = 0`.
pub(crate) struct TwoFieldStepper {
    lu: BandedLu,
    rhs: BandMatrix,
    n: usize,
}

impl TwoFieldStepper {
    pub fn new(lhs: [&SymTridiagonal; 4], rhs: [&SymTridiagonal; 4]) -> Result<Self> {
        let n = lhs[0].dim();
        let lu = interleave(lhs).factor().map_err(|e| {
            PgdError::SolverFailure(format!("step matrix factorization failed: {e}"))
        })?;
        Ok(Self {
            lu,
            rhs: interleave(rhs),
            n,
        })
    }

    /// Integrate with per-interval sources `s₁`, `s₂` (`n × N_t`, column `k`
    /// holds the source of interval `[tᵏ, tᵏ⁺¹]`).
    pub fn run(&self, s1: &DMatrix<f64>, s2: Option<&DMatrix<f64>>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.n;
        let steps = s1.ncols();
        let mut first = DMatrix::zeros(n, steps + 1);
        let mut second = DMatrix::zeros(n, steps + 1);
        let mut x = vec![0.0; 2 * n];
        for k in 0..steps {
            let mut b = self.rhs.mul_slice(&x);
            let a = col(s1, k);
            for i in 0..n {
                b[2 * i] += a[i];
            }
            if let Some(s2) = s2 {
                let c = col(s2, k);
                for i in 0..n {
                    b[2 * i + 1] += c[i];
                }
            }
            self.lu.solve_in_place(&mut b);
            if b.iter().any(|v| !v.is_finite()) {
                return Err(PgdError::SolverFailure(format!("non-finite state at step {}", k + 1)));
            }
            for i in 0..n {
                first[(i, k + 1)] = b[2 * i];
                second[(i, k + 1)] = b[2 * i + 1];
            }
            x = b;
        }
        Ok((first, second))
    }
}

/// `h (gⁿ + gⁿ⁺¹)` for every interval.
pub(crate) fn trapezoid_sources(g: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let steps = g.ncols() - 1;
    DMatrix::from_fn(g.nrows(), steps, |i, k| h * (g[(i, k)] + g[(i, k + 1)]))
}

/// Lagrangian Crank–Nicolson: displacement and velocity as unknowns,
/// `[[hK, 2M + hC], [2M, −hM]] xⁿ⁺¹ = [[−hK, 2M − hC], [2M, hM]] xⁿ + sources`.
pub fn solve_lagrangian_cn(problem: &Problem) -> Result<TrajectorySet> {
    let ops = &problem.ops;
    let h = problem.dt();
    let hk = ops.stiffness.scaled(h);
    let two_m = ops.mass.scaled(2.0);
    let hm = ops.mass.scaled(h);
    let hc = ops.damping.scaled(h);
    let lhs12 = SymTridiagonal::combine(&[(1.0, &two_m), (1.0, &hc)]);
    let rhs12 = SymTridiagonal::combine(&[(1.0, &two_m), (-1.0, &hc)]);
    let stepper = TwoFieldStepper::new(
        [&hk, &lhs12, &two_m, &hm.scaled(-1.0)],
        [&hk.scaled(-1.0), &rhs12, &two_m, &hm],
    )?;
    let s1 = trapezoid_sources(&problem.lagrangian_forcing, h);
    let (w, v) = stepper.run(&s1, None)?;
    let displacement = problem.embed_displacement(&w)?;
    let velocity = problem.embed_velocity(&v)?;
    let momentum = problem.momentum_from_velocity(&velocity)?;
    Ok(TrajectorySet {
        kind: TrajectoryKind::LagrangianCn,
        displacement,
        companion: velocity,
        momentum,
        acceleration: None,
    })
}

/// Hamiltonian Crank–Nicolson: displacement and momentum as unknowns,
/// `[[hK, 2M̄ + hC̃], [2M̄, −hM̄̄]] xⁿ⁺¹ = [[−hK, 2M̄ − hC̃], [2M̄, hM̄̄]] xⁿ + sources`.
pub fn solve_hamiltonian_cn(problem: &Problem) -> Result<TrajectorySet> {
    let ops = &problem.ops;
    let h = problem.dt();
    let hk = ops.stiffness.scaled(h);
    let two_mb = ops.l2_mass.scaled(2.0);
    let hmbb = ops.compliance_mass.scaled(h);
    let hc = ops.momentum_damping.scaled(h);
    let lhs12 = SymTridiagonal::combine(&[(1.0, &two_mb), (1.0, &hc)]);
    let rhs12 = SymTridiagonal::combine(&[(1.0, &two_mb), (-1.0, &hc)]);
    let stepper = TwoFieldStepper::new(
        [&hk, &lhs12, &two_mb, &hmbb.scaled(-1.0)],
        [&hk.scaled(-1.0), &rhs12, &two_mb, &hmbb],
    )?;
    let s1 = trapezoid_sources(&problem.hamiltonian_forcing, h);
    let s2 = if problem.lift.is_zero {
        None
    } else {
        Some(trapezoid_sources(&problem.kinematic_forcing, h))
    };
    let (w, p) = stepper.run(&s1, s2.as_ref())?;
    let displacement = problem.embed_displacement(&w)?;
    let momentum = problem.embed_momentum(&p)?;
    Ok(TrajectorySet {
        kind: TrajectoryKind::HamiltonianCn,
        displacement,
        companion: momentum.clone(),
        momentum,
        acceleration: None,
    })
}
