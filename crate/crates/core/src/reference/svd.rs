//! Optimal low-rank truncation of a space-time DOF matrix.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::linalg::SymTridiagonal;
use crate::metrics::spacetime_norm;

/// Truncated SVD of one space-time matrix with its rank-`m` truncation
/// errors for `m = 0..=max_rank`.
#[derive(Debug, Clone)]
pub struct SvdTruncation {
    pub singular_values: Vec<f64>,
    /// Left singular vectors (columns), at most `max_rank` of them.
    pub left: DMatrix<f64>,
    /// Right singular vectors (columns), at most `max_rank` of them.
    pub right: DMatrix<f64>,
    pub frobenius_errors: Vec<f64>,
    pub spacetime_errors: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SvdBaseline {
    pub displacement: SvdTruncation,
    pub momentum: SvdTruncation,
}

impl SvdTruncation {
    pub fn new(matrix: &DMatrix<f64>, metric: &SymTridiagonal, dt: f64, max_rank: usize) -> Result<Self> {
        let svd = matrix.clone().svd(true, true);
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].max(0.0)).collect();
        let u = svd.u.expect("requested");
        let vt = svd.v_t.expect("requested");
        let keep = max_rank.min(singular_values.len());
        let left = DMatrix::from_fn(matrix.nrows(), keep, |r, c| u[(r, order[c])]);
        let right = DMatrix::from_fn(matrix.ncols(), keep, |r, c| vt[(order[c], r)]);

        let mut frobenius_errors = Vec::with_capacity(keep + 1);
        let mut spacetime_errors = Vec::with_capacity(keep + 1);
        let mut residual = matrix.clone();
        for m in 0..=keep {
            if m > 0 {
                let s = singular_values[m - 1];
                residual.ger(-s, &left.column(m - 1), &right.column(m - 1), 1.0);
            }
            let tail: f64 = singular_values[m..].iter().map(|s| s * s).sum();
            frobenius_errors.push(tail.sqrt());
            spacetime_errors.push(spacetime_norm(&residual, metric, dt)?);
        }
        Ok(Self {
            singular_values,
            left,
            right,
            frobenius_errors,
            spacetime_errors,
        })
    }

    /// Rank-`m` reconstruction.
    pub fn reconstruct(&self, m: usize) -> DMatrix<f64> {
        let m = m.min(self.left.ncols());
        let mut out = DMatrix::zeros(self.left.nrows(), self.right.nrows());
        for i in 0..m {
            out.ger(self.singular_values[i], &self.left.column(i), &self.right.column(i), 1.0);
        }
        out
    }
}

/// SVD baselines of a displacement and a momentum matrix.
pub fn svd_baseline(
    displacement: &DMatrix<f64>,
    momentum: &DMatrix<f64>,
    metric: &SymTridiagonal,
    dt: f64,
    max_rank: usize,
) -> Result<SvdBaseline> {
    Ok(SvdBaseline {
        displacement: SvdTruncation::new(displacement, metric, dt, max_rank)?,
        momentum: SvdTruncation::new(momentum, metric, dt, max_rank)?,
    })
}
