//! Separated space-time representation `Σᵢ μᵢ(x) λᵢ(t)` on the active DOFs.

use nalgebra::{DMatrix, DVector};

use crate::error::{PgdError, Result};
use crate::fem::gram_schmidt::orthonormalize_against;
use crate::fem::time_integrals::product_unchecked;
use crate::linalg::SymTridiagonal;

/// Spatial modes with their temporal factors. `rate` carries the companion
/// trajectory `ωᵢ ≈ λ̇ᵢ` and `acceleration` the Newmark second derivative
/// when the producing scheme provides them; both are either empty or of the
/// same length as `temporal`.
#[derive(Debug, Clone, Default)]
pub struct SeparatedField {
    pub spatial: Vec<DVector<f64>>,
    pub temporal: Vec<Vec<f64>>,
    pub rate: Vec<Vec<f64>>,
    pub acceleration: Vec<Vec<f64>>,
}

impl SeparatedField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.spatial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spatial.is_empty()
    }

    pub fn push(&mut self, mu: DVector<f64>, lambda: Vec<f64>, rate: Option<Vec<f64>>, acceleration: Option<Vec<f64>>) {
        self.spatial.push(mu);
        self.temporal.push(lambda);
        if let Some(r) = rate {
            self.rate.push(r);
        }
        if let Some(a) = acceleration {
            self.acceleration.push(a);
        }
    }

    /// Spatial modes as matrix columns.
    pub fn basis(&self, dim: usize) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(dim, self.rank());
        for (j, mu) in self.spatial.iter().enumerate() {
            b.set_column(j, mu);
        }
        b
    }

    /// `Σᵢ μᵢ sᵢᵀ` for a family of time series (one per mode).
    pub fn expand(&self, series: &[Vec<f64>], dim: usize, nodes: usize) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(dim, nodes);
        for (mu, s) in self.spatial.iter().zip(series) {
            for (k, &v) in s.iter().enumerate() {
                if v != 0.0 {
                    out.column_mut(k).axpy(v, mu, 1.0);
                }
            }
        }
        out
    }

    pub fn dense(&self, dim: usize, nodes: usize) -> DMatrix<f64> {
        self.expand(&self.temporal, dim, nodes)
    }

    pub fn dense_rate(&self, dim: usize, nodes: usize) -> DMatrix<f64> {
        self.expand(&self.rate, dim, nodes)
    }

    pub fn dense_acceleration(&self, dim: usize, nodes: usize) -> DMatrix<f64> {
        self.expand(&self.acceleration, dim, nodes)
    }

    /// Space-time norm with spatial metric `g`, evaluated without
    /// densification: `Σᵢⱼ (∫λᵢλⱼ dt)(μᵢᵀ g μⱼ)`.
    pub fn spacetime_norm(&self, g: &SymTridiagonal, dt: f64) -> f64 {
        let m = self.rank();
        let mut sum = 0.0;
        for i in 0..m {
            for j in i..m {
                let sx = g.bilinear(self.spatial[i].as_slice(), self.spatial[j].as_slice());
                let st = product_unchecked(&self.temporal[i], &self.temporal[j], dt);
                sum += if i == j { sx * st } else { 2.0 * sx * st };
            }
        }
        sum.max(0.0).sqrt()
    }

    /// Gram matrix `[μᵢᵀ A μⱼ]`.
    pub fn gram(&self, a: &SymTridiagonal) -> DMatrix<f64> {
        let m = self.rank();
        let mut g = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = a.bilinear(self.spatial[i].as_slice(), self.spatial[j].as_slice());
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    /// Make the newest spatial mode `G`-orthonormal against the others,
    /// transferring the removed components onto the older temporal factors
    /// so that the represented field is unchanged. Returns true when the
    /// newest mode was dependent; it then becomes a fresh orthonormal
    /// direction with a zero temporal factor.
    pub fn orthonormalize_newest(&mut self, g: &SymTridiagonal) -> Result<bool> {
        let m = self.rank();
        if m == 0 {
            return Err(PgdError::InvalidState("no mode to orthonormalize".into()));
        }
        let (older, newest) = self.spatial.split_at(m - 1);
        let o = orthonormalize_against(g, older, &newest[0])?;
        fn transfer(series: &mut [Vec<f64>], coeffs: &[f64], norm: f64) {
            if series.is_empty() {
                return;
            }
            let (older, newest) = series.split_at_mut(series.len() - 1);
            for (s, &c) in older.iter_mut().zip(coeffs) {
                if c != 0.0 {
                    s.iter_mut().zip(&newest[0]).for_each(|(a, b)| *a += c * b);
                }
            }
            newest[0].iter_mut().for_each(|v| *v *= norm);
        }
        transfer(&mut self.temporal, &o.coefficients, o.norm);
        transfer(&mut self.rate, &o.coefficients, o.norm);
        transfer(&mut self.acceleration, &o.coefficients, o.norm);
        self.spatial[m - 1] = o.vector;
        Ok(o.dependent)
    }
}

/// `‖a bᵀ‖` in the space-time norm with spatial metric `g`.
pub fn rank_one_norm(g: &SymTridiagonal, mu: &DVector<f64>, lambda: &[f64], dt: f64) -> f64 {
    (g.quad(mu.as_slice()).max(0.0) * product_unchecked(lambda, lambda, dt).max(0.0)).sqrt()
}

/// `‖μ₁λ₁ᵀ − μ₀λ₀ᵀ‖`, computed from a `g`-orthogonal split of `μ₀` so that
/// small differences do not suffer cancellation.
pub fn rank_two_difference_norm(
    g: &SymTridiagonal,
    mu1: &DVector<f64>,
    lambda1: &[f64],
    mu0: &DVector<f64>,
    lambda0: &[f64],
    dt: f64,
) -> f64 {
    let n1 = g.quad(mu1.as_slice());
    if n1 <= 0.0 {
        return rank_one_norm(g, mu0, lambda0, dt);
    }
    let alpha = g.bilinear(mu1.as_slice(), mu0.as_slice()) / n1;
    let r = mu0 - mu1 * alpha;
    let dl: Vec<f64> = lambda1.iter().zip(lambda0).map(|(a, b)| a - alpha * b).collect();
    let a = n1 * product_unchecked(&dl, &dl, dt);
    let b = g.quad(r.as_slice()).max(0.0) * product_unchecked(lambda0, lambda0, dt);
    (a.max(0.0) + b).sqrt()
}

/// Stagnation coefficient `‖Δ‖ / ‖Σ‖` with `Δ = μ₁λ₁ − μ₀λ₀` and
/// `Σ = (μ₁λ₁ + μ₀λ₀)/2`. Returns 0 when both products vanish.
pub fn stagnation(
    g: &SymTridiagonal,
    mu1: &DVector<f64>,
    lambda1: &[f64],
    mu0: &DVector<f64>,
    lambda0: &[f64],
    dt: f64,
) -> f64 {
    let diff = rank_two_difference_norm(g, mu1, lambda1, mu0, lambda0, dt);
    let neg0 = mu0 * -1.0;
    let sum = 0.5 * rank_two_difference_norm(g, mu1, lambda1, &neg0, lambda0, dt);
    if sum == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::spacetime_norm;
    use proptest::prelude::*;

    fn metric(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0 / 3.0; n], vec![1.0 / 6.0; n - 1]).unwrap()
    }

    #[test]
    fn stagnation_is_scale_invariant() {
        let g = metric(4);
        let mu1 = DVector::from_vec(vec![1.0, 0.5, -0.2, 0.1]);
        let mu0 = DVector::from_vec(vec![0.9, 0.6, -0.1, 0.0]);
        let l1 = vec![0.0, 0.3, 0.7, 1.0];
        let l0 = vec![0.0, 0.2, 0.8, 1.1];
        let s = stagnation(&g, &mu1, &l1, &mu0, &l0, 0.1);
        let c = 37.5;
        let l1s: Vec<f64> = l1.iter().map(|v| v / c).collect();
        let s2 = stagnation(&g, &(&mu1 * c), &l1s, &mu0, &l0, 0.1);
        assert!((s - s2).abs() <= 1e-12 * s);
        assert_eq!(stagnation(&g, &mu1, &l1, &mu1, &l1, 0.1), 0.0);
    }

    #[test]
    fn orthonormalization_preserves_field() {
        let g = metric(3);
        let mut f = SeparatedField::new();
        f.push(DVector::from_vec(vec![1.0, 2.0, 0.0]), vec![0.0, 1.0, 2.0], None, None);
        f.orthonormalize_newest(&g).unwrap();
        f.push(DVector::from_vec(vec![0.5, 1.0, 1.0]), vec![0.0, -1.0, 0.5], None, None);
        let before = f.dense(3, 3);
        assert!(!f.orthonormalize_newest(&g).unwrap());
        let after = f.dense(3, 3);
        assert!((before - after).amax() < 1e-13);
        let gram = f.gram(&g);
        assert!((gram - DMatrix::identity(2, 2)).amax() < 1e-13);
    }

    #[test]
    fn dependent_mode_gets_zero_temporal_factor() {
        let g = metric(3);
        let mut f = SeparatedField::new();
        f.push(DVector::from_vec(vec![1.0, 2.0, 0.0]), vec![0.0, 1.0, 2.0], None, None);
        f.orthonormalize_newest(&g).unwrap();
        f.push(DVector::from_vec(vec![2.0, 4.0, 0.0]), vec![0.0, 1.0, 1.0], None, None);
        let before = f.dense(3, 3);
        assert!(f.orthonormalize_newest(&g).unwrap());
        assert!(f.temporal[1].iter().all(|&v| v == 0.0));
        assert!((before - f.dense(3, 3)).amax() < 1e-13);
        assert!((f.gram(&g) - DMatrix::identity(2, 2)).amax() < 1e-13);
    }

    proptest! {
        #[test]
        fn separated_norm_matches_dense(
            data in prop::collection::vec(-1.0f64..1.0, 3 * 4 + 3 * 5),
        ) {
            let g = metric(4);
            let mut f = SeparatedField::new();
            for r in 0..3 {
                let mu = DVector::from_column_slice(&data[4 * r..4 * r + 4]);
                let mut lam = data[12 + 5 * r..12 + 5 * r + 5].to_vec();
                lam[0] = 0.0;
                f.push(mu, lam, None, None);
            }
            let dense = spacetime_norm(&f.dense(4, 5), &g, 0.25).unwrap();
            let sep = f.spacetime_norm(&g, 0.25);
            prop_assert!((dense - sep).abs() <= 1e-12 * (1.0 + dense));
        }
    }
}
