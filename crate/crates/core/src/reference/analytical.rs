//! Modal series for a bar clamped at `x = 0`, free at `x = ℓ`, released at
//! rest from the uniform pre-strain `u₀(x) = ε x`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{PgdError, Result};
use crate::fem::mesh::{Mesh1D, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub length: f64,
    pub wave_speed: f64,
    /// Initial strain `ε = F / EA`.
    pub strain: f64,
}

/// `k`-th eigenpair (1-based): eigenvalue `((2k − 1)π / 2ℓ)²` and the
/// eigenfunction `sin(√λ x)` evaluated at `x`.
pub fn eigenpair(k: usize, length: f64, x: f64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(PgdError::invalid("eigenpair index is 1-based"));
    }
    let root = (2 * k - 1) as f64 * PI / (2.0 * length);
    Ok((root * root, (root * x).sin()))
}

/// Partial sum with `n_terms` terms of
/// `u = (8εℓ/π²) Σ (−1)ᵏ⁺¹ / (2k−1)² sin((2k−1)πx/2ℓ) cos((2k−1)πct/2ℓ)`.
pub fn analytical_series(x: f64, t: f64, n_terms: usize, params: &SeriesParams) -> Result<f64> {
    if n_terms < 1 {
        return Err(PgdError::invalid("n_terms must be at least 1"));
    }
    let SeriesParams {
        length,
        wave_speed,
        strain,
    } = *params;
    let mut sum = 0.0;
    for k in 1..=n_terms {
        let odd = (2 * k - 1) as f64;
        let arg = odd * PI / (2.0 * length);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign / (odd * odd) * (arg * x).sin() * (arg * wave_speed * t).cos();
    }
    Ok(8.0 * strain * length / (PI * PI) * sum)
}

/// Series sampled at the free nodes and every time node.
pub fn analytical_field(mesh: &Mesh1D, grid: &TimeGrid, n_terms: usize, params: &SeriesParams) -> Result<DMatrix<f64>> {
    let xs = mesh.free_nodes();
    let mut out = DMatrix::zeros(xs.len(), grid.nodes());
    for k in 0..grid.nodes() {
        let t = grid.t(k);
        for (i, &x) in xs.iter().enumerate() {
            out[(i, k)] = analytical_series(x, t, n_terms, params)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> SeriesParams {
        SeriesParams {
            length: 0.2,
            wave_speed: (220e9f64 / 7000.0).sqrt(),
            strain: 0.05,
        }
    }

    #[test]
    fn clamped_end_is_fixed() {
        for n in [1, 7, 200] {
            for t in [0.0, 1e-5, 1.3e-4] {
                assert_eq!(analytical_series(0.0, t, n, &params()).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn first_eigenvalue() {
        let (lam, _) = eigenpair(1, 0.2, 0.0).unwrap();
        assert!((lam - (PI / 0.4).powi(2)).abs() < 1e-12 * lam);
    }

    #[test]
    fn initial_profile_recovered() {
        // At t = 0 the partial-sum error is largest at the free end, where
        // every omitted term has the same sign and the error equals the tail
        // (8/π²) Σ_{k>n} 1/(2k−1)² · εℓ ≈ 1.013e-3 εℓ for n = 200.
        let p = params();
        let scale = p.strain * p.length;
        let tail: f64 = (201..2_000_000).map(|k| 1.0 / ((2 * k - 1) as f64).powi(2)).sum::<f64>() * 8.0 / (PI * PI);
        for i in 0..=56 {
            let x = 0.2 * i as f64 / 56.0;
            let err = (analytical_series(x, 0.0, 200, &p).unwrap() - p.strain * x).abs();
            assert!(err <= tail * scale * (1.0 + 1e-3), "x = {x}");
            if i < 56 {
                assert!(err <= 1e-3 * scale, "x = {x}");
            }
        }
        let end = (analytical_series(0.2, 0.0, 200, &p).unwrap() - p.strain * 0.2).abs();
        assert!((end - tail * scale).abs() <= 1e-3 * tail * scale);
    }

    #[test]
    fn zero_terms_rejected() {
        assert!(analytical_series(0.1, 0.0, 0, &params()).is_err());
    }
}
