//! Modified Gram–Schmidt in an operator metric `⟨x, y⟩_G = xᵀ G y`.

use nalgebra::DVector;

use crate::error::{PgdError, Result};
use crate::linalg::SymTridiagonal;

/// Post-projection norms below this fraction of the input norm mark the
/// vector as numerically dependent on the existing basis.
pub const DEPENDENCE_TOL: f64 = 1e-12;

/// Result of orthonormalizing one vector against an orthonormal basis:
/// `v = Σᵢ coefficients[i] basisᵢ + norm · vector`.
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    pub vector: DVector<f64>,
    pub coefficients: Vec<f64>,
    pub norm: f64,
    /// `v` lay (numerically) in the span of the basis. `vector` is then a unit
    /// direction orthogonal to the basis and `norm` is zero.
    pub dependent: bool,
}

fn metric_norm(g: &SymTridiagonal, v: &DVector<f64>) -> f64 {
    g.quad(v.as_slice()).max(0.0).sqrt()
}

fn project_out(g: &SymTridiagonal, basis: &[DVector<f64>], v: &mut DVector<f64>, coeffs: &mut [f64]) {
    for _pass in 0..2 {
        for (b, c) in basis.iter().zip(coeffs.iter_mut()) {
            let r = g.bilinear(b.as_slice(), v.as_slice());
            v.axpy(-r, b, 1.0);
            *c += r;
        }
    }
}

/// Orthonormalize `v` against the `G`-orthonormal `basis`.
///
/// Fails when `basis` already spans the whole space and `v` is dependent, or
/// when dimensions disagree.
pub fn orthonormalize_against(
    g: &SymTridiagonal,
    basis: &[DVector<f64>],
    v: &DVector<f64>,
) -> Result<Orthonormalized> {
    let n = g.dim();
    if v.len() != n || basis.iter().any(|b| b.len() != n) {
        return Err(PgdError::invalid("vector dimension does not match the metric"));
    }
    let input = metric_norm(g, v);
    let mut w = v.clone();
    let mut coefficients = vec![0.0; basis.len()];
    if input > 0.0 {
        project_out(g, basis, &mut w, &mut coefficients);
        let norm = metric_norm(g, &w);
        if norm > DEPENDENCE_TOL * input {
            w /= norm;
            return Ok(Orthonormalized {
                vector: w,
                coefficients,
                norm,
                dependent: false,
            });
        }
    }
    let vector = complement_direction(g, basis)?;
    Ok(Orthonormalized {
        vector,
        coefficients,
        norm: 0.0,
        dependent: true,
    })
}

/// A unit vector `G`-orthogonal to `basis`, built from the canonical direction
/// with the largest residual after projection.
pub fn complement_direction(g: &SymTridiagonal, basis: &[DVector<f64>]) -> Result<DVector<f64>> {
    let n = g.dim();
    if basis.len() >= n {
        return Err(PgdError::DegenerateMode(format!(
            "basis of size {} already spans the {n}-dimensional space",
            basis.len()
        )));
    }
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut scratch = vec![0.0; basis.len()];
    for k in 0..n {
        let mut e = DVector::zeros(n);
        e[k] = 1.0;
        let before = metric_norm(g, &e);
        project_out(g, basis, &mut e, &mut scratch);
        let ratio = metric_norm(g, &e) / before;
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, e));
        }
    }
    let (ratio, mut e) = best.expect("n > 0");
    if ratio <= DEPENDENCE_TOL {
        return Err(PgdError::DegenerateMode("no complement direction found".into()));
    }
    project_out(g, basis, &mut e, &mut scratch);
    let norm = metric_norm(g, &e);
    e /= norm;
    Ok(e)
}

/// Orthonormalize a list of vectors in order. Returns the basis, the upper
/// triangular factor as columns (`r[j][i]`, `i ≤ j`) and dependence flags.
pub fn metric_orthonormalize(
    g: &SymTridiagonal,
    vectors: &[DVector<f64>],
) -> Result<(Vec<DVector<f64>>, Vec<Vec<f64>>, Vec<bool>)> {
    let mut basis = Vec::with_capacity(vectors.len());
    let mut r = Vec::with_capacity(vectors.len());
    let mut flags = Vec::with_capacity(vectors.len());
    for v in vectors {
        let o = orthonormalize_against(g, &basis, v)?;
        let mut col = o.coefficients;
        col.push(o.norm);
        r.push(col);
        flags.push(o.dependent);
        basis.push(o.vector);
    }
    Ok((basis, r, flags))
}
