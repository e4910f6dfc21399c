//! Dense reference solvers.
//!
//! Everything here builds explicit `MN x MN` matrices and factorizes them,
//! so it is only usable on small grids. A size guard rejects anything larger
//! than [`MAX_ORACLE_CELLS`] cells. Used by the test suites to check the
//! Fourier-domain code paths.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::features::FeatureSample;
use crate::spectral::{circular_convolve, ensure_same_dims, RealPlane};

pub const MAX_ORACLE_CELLS: usize = 4096;

fn guard(dims: (usize, usize)) -> Result<()> {
    let cells = dims.0 * dims.1;
    if cells > MAX_ORACLE_CELLS {
        return Err(Error::TestScale(format!(
            "{}x{} grid has {cells} cells, limit is {MAX_ORACLE_CELLS}",
            dims.0, dims.1
        )));
    }
    Ok(())
}

/// Matrix whose rows are all 2-D cyclic shifts of one channel.
///
/// Row `m*N + n` is the row-major flattening of the base sample shifted by
/// `(m, n)`, i.e. `X[(m,n), q] = x[q - (m,n)]`. With this layout
/// `X^T w` is the circular convolution `x * w` and `X w` is the circular
/// correlation of `x` with `w`.
#[derive(Clone, Debug)]
pub struct DenseCirculant {
    matrix: DMatrix<f64>,
    dims: (usize, usize),
}

impl DenseCirculant {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    /// `X v` reshaped to the grid.
    pub fn apply(&self, v: &RealPlane) -> Result<RealPlane> {
        ensure_same_dims(self.dims, v.dims())?;
        let out = &self.matrix * flatten(v);
        unflatten(self.dims, &out)
    }

    /// `X^T v` reshaped to the grid.
    pub fn apply_transpose(&self, v: &RealPlane) -> Result<RealPlane> {
        ensure_same_dims(self.dims, v.dims())?;
        let out = self.matrix.tr_mul(&flatten(v));
        unflatten(self.dims, &out)
    }
}

pub fn build_circulant(x: &RealPlane) -> Result<DenseCirculant> {
    guard(x.dims())?;
    let (rows, cols) = x.dims();
    let mn = rows * cols;
    let mut matrix = DMatrix::zeros(mn, mn);
    for m in 0..rows {
        for n in 0..cols {
            let shifted = x.circshift(m as isize, n as isize);
            for (q, &v) in shifted.as_slice().iter().enumerate() {
                matrix[(m * cols + n, q)] = v;
            }
        }
    }
    Ok(DenseCirculant { matrix, dims: (rows, cols) })
}

fn flatten(p: &RealPlane) -> DVector<f64> {
    DVector::from_column_slice(p.as_slice())
}

fn unflatten(dims: (usize, usize), v: &DVector<f64>) -> Result<RealPlane> {
    RealPlane::new(dims.0, dims.1, v.as_slice().to_vec())
}

fn solve_dense(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    a.lu().solve(&b).ok_or_else(|| Error::invalid("dense system is singular"))
}

fn check(x: &FeatureSample, y: &RealPlane, lambda: f64) -> Result<()> {
    guard(x.dims())?;
    ensure_same_dims(x.dims(), y.dims())?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    Ok(())
}

/// Per-channel ridge regression `(X X^T + lambda I) w = X y`.
pub fn solve_standard_cf(x: &FeatureSample, y: &RealPlane, lambda: f64) -> Result<Vec<RealPlane>> {
    check(x, y, lambda)?;
    let yv = flatten(y);
    x.channels()
        .iter()
        .map(|xl| {
            let xm = build_circulant(xl)?;
            let a = &xm.matrix * xm.matrix.transpose() + DMatrix::identity(y.len(), y.len()) * lambda;
            let b = &xm.matrix * &yv;
            unflatten(y.dims(), &solve_dense(a, b)?)
        })
        .collect()
}

/// The same ridge regression solved per frequency:
/// `w^ = conj(x~) y^ / (|x~|^2 + lambda)` with `x~` the operator spectrum.
pub fn solve_standard_cf_frequency(x: &FeatureSample, y: &RealPlane, lambda: f64) -> Result<Vec<RealPlane>> {
    use crate::solver::operator_spectrum;
    use crate::spectral::{dft2, idft2};
    check(x, y, lambda)?;
    let y_hat = dft2(y)?;
    x.channels()
        .iter()
        .map(|xl| {
            let xo = operator_spectrum(xl)?;
            let w_hat = xo.zip_map(&y_hat, |a, b| a.conj() * b / (a.norm_sqr() + lambda))?;
            Ok(idft2(&w_hat)?.re())
        })
        .collect()
}

/// Per-channel minimizer of `||X^T (c.w) - y||^2 + lambda ||w||^2`, from
/// `(C X X^T C + lambda I) w = C X y`.
pub fn solve_rfct_dense(x: &FeatureSample, y: &RealPlane, c: &RealPlane, lambda: f64) -> Result<Vec<RealPlane>> {
    check(x, y, lambda)?;
    ensure_same_dims(x.dims(), c.dims())?;
    let cd = DMatrix::from_diagonal(&flatten(c));
    let yv = flatten(y);
    x.channels()
        .iter()
        .map(|xl| {
            let xm = build_circulant(xl)?;
            let cx = &cd * &xm.matrix;
            let a = &cx * cx.transpose() + DMatrix::identity(y.len(), y.len()) * lambda;
            let b = &cx * &yv;
            unflatten(y.dims(), &solve_dense(a, b)?)
        })
        .collect()
}

/// Per-channel minimizer of `||X^T t - y||^2 + lambda ||C^-1 t||^2`.
/// Requires every map entry to be nonzero. Returns `t`.
pub fn solve_srdcf_equivalent(x: &FeatureSample, y: &RealPlane, c: &RealPlane, lambda: f64) -> Result<Vec<RealPlane>> {
    check(x, y, lambda)?;
    ensure_same_dims(x.dims(), c.dims())?;
    if let Some(i) = c.as_slice().iter().position(|&v| v == 0.0) {
        return Err(Error::invalid(format!("map entry {i} is zero; the map must be invertible")));
    }
    let inv_sq = DMatrix::from_diagonal(&DVector::from_iterator(c.len(), c.as_slice().iter().map(|v| 1.0 / (v * v))));
    let yv = flatten(y);
    x.channels()
        .iter()
        .map(|xl| {
            let xm = build_circulant(xl)?;
            let a = &xm.matrix * xm.matrix.transpose() + inv_sq.clone() * lambda;
            let b = &xm.matrix * &yv;
            unflatten(y.dims(), &solve_dense(a, b)?)
        })
        .collect()
}

/// `sum_l z_l * f_l` computed by explicit cyclic-shift sums.
pub fn brute_force_response(z: &FeatureSample, effective: &[RealPlane]) -> Result<RealPlane> {
    if effective.len() != z.d() {
        return Err(Error::invalid(format!("{} filter channels for {} sample channels", effective.len(), z.d())));
    }
    let mut acc = RealPlane::zeros(z.dims().0, z.dims().1);
    for (zl, fl) in z.channels().iter().zip(effective) {
        acc = acc.lincomb(1.0, &circular_convolve(zl, fl)?, 1.0)?;
    }
    Ok(acc)
}

/// `sum_l ||X_l^T (c.w_l) - y||^2 + lambda ||w_l||^2` by brute force.
pub fn rfct_objective(x: &FeatureSample, y: &RealPlane, c: &RealPlane, w: &[RealPlane], lambda: f64) -> Result<f64> {
    if w.len() != x.d() {
        return Err(Error::invalid("filter and sample channel counts differ"));
    }
    let mut total = 0.0;
    for (xl, wl) in x.channels().iter().zip(w) {
        let r = circular_convolve(xl, &c.hadamard(wl)?)?.lincomb(1.0, y, -1.0)?;
        total += r.norm_sq() + lambda * wl.norm_sq();
    }
    Ok(total)
}
