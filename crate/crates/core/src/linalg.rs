//! Small linear-algebra kernels: symmetric tridiagonal operators and a banded
//! LU factorization with partial pivoting.
//!
//! P1 finite elements in 1D only ever produce tridiagonal matrices, and the
//! coupled two-field systems become banded once unknowns are interleaved, so
//! dense storage is reserved for the small Gram/update systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{PgdError, Result};

/// Symmetric tridiagonal matrix. `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        let expected = diag.len().saturating_sub(1);
        if off.len() != expected {
            return Err(PgdError::invalid(format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i + 1 == j {
            self.off[i]
        } else if j + 1 == i {
            self.off[j]
        } else {
            0.0
        }
    }

    pub fn mul_slice(&self, x: &[f64]) -> DVector<f64> {
        let mut y = DVector::zeros(self.dim());
        self.mul_into(x, y.as_mut_slice());
        y
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        self.mul_slice(x.as_slice())
    }

    /// `y = A x` without allocating.
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = self.diag[i] * y[i];
            if i > 0 {
                row += self.off[i - 1] * y[i - 1];
            }
            if i + 1 < n {
                row += self.off[i] * y[i + 1];
            }
            acc += x[i] * row;
        }
        acc
    }

    pub fn quad(&self, x: &[f64]) -> f64 {
        self.bilinear(x, x)
    }

    /// `Σ cₖ Aₖ` over operators of equal dimension.
    pub fn combine(terms: &[(f64, &SymTridiagonal)]) -> Self {
        let n = terms.first().map_or(0, |(_, a)| a.dim());
        let mut out = Self::zeros(n);
        for (c, a) in terms {
            assert_eq!(a.dim(), n, "operator dimension mismatch");
            for (o, v) in out.diag.iter_mut().zip(&a.diag) {
                *o += c * v;
            }
            for (o, v) in out.off.iter_mut().zip(&a.off) {
                *o += c * v;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::combine(&[(c, self)])
    }

    /// Leading principal `n × n` block.
    pub fn leading(&self, n: usize) -> Self {
        assert!(n <= self.dim());
        Self {
            diag: self.diag[..n].to_vec(),
            off: self.off[..n.saturating_sub(1)].to_vec(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.off)
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    pub fn to_band(&self) -> BandMatrix {
        let mut band = BandMatrix::zeros(self.dim(), 1, 1);
        for i in 0..self.dim() {
            band.set(i, i, self.diag[i]);
            if i + 1 < self.dim() {
                band.set(i, i + 1, self.off[i]);
                band.set(i + 1, i, self.off[i]);
            }
        }
        band
    }

    pub fn factor(&self) -> Result<BandedLu> {
        self.to_band().factor()
    }
}

/// General band matrix with `lower` sub- and `upper` super-diagonals, stored
/// by column with room for the fill produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    height: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let height = 2 * lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            height,
            data: vec![0.0; height * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        // row i, column j lives at offset (i + kl + ku - j) inside column j
        debug_assert!(i + self.lower + self.upper >= j && i <= j + self.lower);
        j * self.height + (i + self.lower + self.upper - j)
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.lower && j <= i + self.upper
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            0.0
        }
    }

    pub fn mul_slice(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let lo = j.saturating_sub(self.upper);
            let hi = (j + self.lower).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.get(i, j) * xj;
            }
        }
        y
    }

    /// LU factorization with partial pivoting (row interchanges are applied
    /// lazily during the solve, as in LAPACK's `gbtrf`/`gbtrs`).
    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.lower;
        let mut pivots = vec![0usize; n];
        let scale = self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut p = j;
            let mut best = self.get(j, j).abs();
            for i in j + 1..=j + km {
                let v = self.get(i, j).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            pivots[j] = p;
            if best == 0.0 || !best.is_finite() || best <= scale * 1e-300 {
                return Err(PgdError::SolverFailure(format!(
                    "band matrix is singular at column {j}"
                )));
            }
            ju = ju.max((j + self.upper + (p - j)).min(n - 1));
            if p != j {
                for c in j..=ju {
                    let a = self.slot(j, c);
                    let b = self.slot(p, c);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.get(j, j);
            for i in j + 1..=j + km {
                let s = self.slot(i, j);
                self.data[s] /= pivot;
            }
            for c in j + 1..=ju {
                let t = self.data[self.slot(j, c)];
                if t == 0.0 {
                    continue;
                }
                for i in j + 1..=j + km {
                    let l = self.data[self.slot(i, j)];
                    let s = self.slot(i, c);
                    self.data[s] -= l * t;
                }
            }
        }
        Ok(BandedLu {
            lu: self,
            pivots,
        })
    }
}

/// Factorized band matrix; reusable for any number of right-hand sides.
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.lu.n;
        assert_eq!(b.len(), n);
        let kl = self.lu.lower;
        let kv = self.lu.lower + self.lu.upper;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=(j + kl).min(n - 1) {
                    b[i] -= self.lu.get(i, j) * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.lu.data[self.lu.slot(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= self.lu.data[self.lu.slot(i, j)] * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = b.clone();
        self.solve_in_place(x.as_mut_slice());
        x
    }
}

/// Column `j` of a column-major matrix as a slice.
#[inline]
pub fn col(m: &DMatrix<f64>, j: usize) -> &[f64] {
    let r = m.nrows();
    &m.as_slice()[j * r..(j + 1) * r]
}

#[inline]
pub fn col_mut(m: &mut DMatrix<f64>, j: usize) -> &mut [f64] {
    let r = m.nrows();
    &mut m.as_mut_slice()[j * r..(j + 1) * r]
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// 2-norm condition number; `+∞` once the smallest singular value underflows.
pub fn condition_number(g: &DMatrix<f64>) -> Result<f64> {
    if g.nrows() == 0 || g.ncols() == 0 {
        return Err(PgdError::invalid("condition number of an empty matrix"));
    }
    if g.nrows() != g.ncols() {
        return Err(PgdError::invalid("condition number needs a square matrix"));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Ok(f64::INFINITY);
    }
    let sv = g.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tridiagonal_matvec_matches_dense() {
        let a = SymTridiagonal::new(vec![2.0, 3.0, 4.0], vec![-1.0, 0.5]).unwrap();
        let x = [1.0, -2.0, 0.25];
        let dense = a.to_dense() * DVector::from_column_slice(&x);
        let y = a.mul_slice(&x);
        assert!((dense - y).amax() < 1e-15);
        assert!((a.quad(&x) - dot(&x, a.mul_slice(&x).as_slice())).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_offdiagonal() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn singular_band_is_reported() {
        let a = SymTridiagonal::new(vec![1.0, 1.0], vec![1.0]).unwrap();
        assert!(matches!(a.factor(), Err(PgdError::SolverFailure(_))));
    }

    #[test]
    fn condition_number_of_diagonal() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![10.0, 0.1]));
        assert!((condition_number(&g).unwrap() - 100.0).abs() < 1e-10);
        assert_eq!(condition_number(&DMatrix::<f64>::identity(4, 4)).unwrap(), 1.0);
        assert!(condition_number(&DMatrix::<f64>::zeros(0, 0)).is_err());
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(condition_number(&singular).unwrap() > 1e15);
    }

    fn band_strategy() -> impl Strategy<Value = (usize, usize, usize, Vec<f64>, Vec<f64>)> {
        (1usize..12, 0usize..4, 0usize..4).prop_flat_map(|(n, kl, ku)| {
            (
                Just(n),
                Just(kl),
                Just(ku),
                prop::collection::vec(-1.0f64..1.0, n * n),
                prop::collection::vec(-1.0f64..1.0, n),
            )
        })
    }

    proptest! {
        // Pivoted band LU agrees with a dense solve on random (often indefinite) bands.
        #[test]
        fn banded_lu_matches_dense((n, kl, ku, vals, rhs) in band_strategy()) {
            let mut band = BandMatrix::zeros(n, kl, ku);
            let mut dense = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if band.in_band(i, j) {
                        let v = vals[i * n + j] + if i == j { 0.05 } else { 0.0 };
                        band.set(i, j, v);
                        dense[(i, j)] = v;
                    }
                }
            }
            let b = DVector::from_vec(rhs);
            let Some(reference) = dense.clone().lu().solve(&b) else { return Ok(()); };
            if condition_number(&dense).unwrap() > 1e8 {
                return Ok(());
            }
            let lu = band.factor().unwrap();
            let x = lu.solve(&b);
            let scale = reference.amax().max(1.0);
            prop_assert!((x - reference).amax() <= 1e-8 * scale);
        }
    }
}
