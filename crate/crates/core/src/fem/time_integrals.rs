//! Exact integrals of piecewise-linear time functions sampled on a uniform grid.

use nalgebra::{DMatrix, DVector};

use crate::error::{PgdError, Result};

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(PgdError::invalid(format!(
            "time series lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(PgdError::invalid("time series needs at least two samples"));
    }
    Ok(())
}

/// `∫₀ᵀ a b dt`.
pub fn integrate_product(a: &[f64], b: &[f64], dt: f64) -> Result<f64> {
    check(a, b)?;
    Ok(product_unchecked(a, b, dt))
}

pub(crate) fn product_unchecked(a: &[f64], b: &[f64], dt: f64) -> f64 {
    let mut s = 0.0;
    for n in 0..a.len() - 1 {
        s += 2.0 * a[n] * b[n] + a[n] * b[n + 1] + a[n + 1] * b[n] + 2.0 * a[n + 1] * b[n + 1];
    }
    s * dt / 6.0
}

/// `∫₀ᵀ ȧ b dt` with `ȧ` the piecewise-constant slope of `a`.
pub fn integrate_rate_product(a: &[f64], b: &[f64]) -> Result<f64> {
    check(a, b)?;
    Ok(rate_product_unchecked(a, b))
}

pub(crate) fn rate_product_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for n in 0..a.len() - 1 {
        s += (a[n + 1] - a[n]) * (b[n] + b[n + 1]);
    }
    0.5 * s
}

/// `∫₀ᵀ ȧ ḃ dt`.
pub fn integrate_rate_rate(a: &[f64], b: &[f64], dt: f64) -> Result<f64> {
    check(a, b)?;
    let mut s = 0.0;
    for n in 0..a.len() - 1 {
        s += (a[n + 1] - a[n]) * (b[n + 1] - b[n]);
    }
    Ok(s / dt)
}

/// Nodal weights `c` with `∫ a λ dt = Σₖ aₖ cₖ` for every piecewise-linear `a`.
pub fn product_weights(lambda: &[f64], dt: f64) -> Vec<f64> {
    let n = lambda.len();
    let mut c = vec![0.0; n];
    for k in 0..n - 1 {
        c[k] += dt / 6.0 * (2.0 * lambda[k] + lambda[k + 1]);
        c[k + 1] += dt / 6.0 * (lambda[k] + 2.0 * lambda[k + 1]);
    }
    c
}

/// Nodal weights `c` with `∫ ȧ λ dt = Σₖ aₖ cₖ`.
pub fn rate_weights(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut c = vec![0.0; n];
    for k in 0..n - 1 {
        let avg = 0.5 * (lambda[k] + lambda[k + 1]);
        c[k] -= avg;
        c[k + 1] += avg;
    }
    c
}

/// `∫ A(t) λ(t) dt` for a space-time field `A` (rows: DOFs, columns: time nodes).
pub fn field_times_mode(field: &DMatrix<f64>, lambda: &[f64], dt: f64) -> Result<DVector<f64>> {
    if field.ncols() != lambda.len() {
        return Err(PgdError::invalid(format!(
            "field has {} time columns, mode has {} samples",
            field.ncols(),
            lambda.len()
        )));
    }
    let w = DVector::from_vec(product_weights(lambda, dt));
    Ok(field * w)
}

/// `∫ Ȧ(t) λ(t) dt` for a space-time field `A`.
pub fn field_rate_times_mode(field: &DMatrix<f64>, lambda: &[f64]) -> Result<DVector<f64>> {
    if field.ncols() != lambda.len() {
        return Err(PgdError::invalid(format!(
            "field has {} time columns, mode has {} samples",
            field.ncols(),
            lambda.len()
        )));
    }
    let w = DVector::from_vec(rate_weights(lambda));
    Ok(field * w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_of_identity_ramps() {
        let t: Vec<f64> = (0..=4).map(|k| k as f64 * 0.25).collect();
        assert!((integrate_product(&t, &t, 0.25).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((integrate_rate_product(&t, &t).unwrap() - 0.5).abs() < 1e-15);
        assert!((integrate_rate_rate(&t, &t, 0.25).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(matches!(
            integrate_product(&[1.0, 2.0], &[1.0, 2.0, 3.0], 0.1),
            Err(PgdError::InvalidArgument(_))
        ));
        assert!(integrate_rate_product(&[1.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn weights_reproduce_integrals(
            a in prop::collection::vec(-5.0f64..5.0, 6),
            b in prop::collection::vec(-5.0f64..5.0, 6),
        ) {
            let dt = 0.3;
            let direct = integrate_product(&a, &b, dt).unwrap();
            let via: f64 = a.iter().zip(product_weights(&b, dt)).map(|(x, y)| x * y).sum();
            prop_assert!((direct - via).abs() <= 1e-12 * (1.0 + direct.abs()));
            let rate = integrate_rate_product(&a, &b).unwrap();
            let via: f64 = a.iter().zip(rate_weights(&b)).map(|(x, y)| x * y).sum();
            prop_assert!((rate - via).abs() <= 1e-12 * (1.0 + rate.abs()));
        }

        #[test]
        fn integration_by_parts(
            a in prop::collection::vec(-5.0f64..5.0, 7),
            b in prop::collection::vec(-5.0f64..5.0, 7),
        ) {
            let lhs = integrate_rate_product(&a, &b).unwrap() + integrate_rate_product(&b, &a).unwrap();
            let rhs = a[6] * b[6] - a[0] * b[0];
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }
}
