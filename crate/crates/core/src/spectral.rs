//! Two-dimensional DFT primitives and the planes they operate on.
//!
//! All transforms are unitary: `dft2` and `idft2` both scale by `1/sqrt(MN)`,
//! so Parseval holds without a size factor. The price is that the
//! convolution theorem picks up a gain:
//!
//! ```text
//! dft2(x * w)            = sqrt(MN) . dft2(x) . dft2(w)          (circular convolution)
//! dft2(correlate(x, w))  = sqrt(MN) . conj(dft2(x)) . dft2(w)    (circular correlation)
//! ```
//!
//! where `correlate(x, w)[u] = sum_p x[p] w[p + u]`. Training and detection
//! both use circular convolution; correlation appears only as its adjoint.
//!
//! Planes store the target centre at index `(0, 0)`; negative displacements
//! wrap to the far end of each axis (see [`signed_offset`]).

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::{FftDirection, FftPlanner};

pub use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major M x N grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealPlane = Plane<f64>;
pub type ComplexPlane = Plane<Complex64>;

impl<T: Copy> Plane<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("plane dims must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!("plane data has {} values, expected {rows}x{cols}", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        assert!(rows > 0 && cols > 0, "plane dims must be positive");
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(rows > 0 && cols > 0, "plane dims must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }

    /// Value at `(r, c)` with both indices taken modulo the plane size.
    #[inline]
    pub fn get_wrapped(&self, r: isize, c: isize) -> T {
        let r = r.rem_euclid(self.rows as isize) as usize;
        let c = c.rem_euclid(self.cols as isize) as usize;
        self.get(r, c)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Plane<U> {
        Plane { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// Element-wise combination of two planes of equal dims.
    pub fn zip_map<U: Copy, V: Copy>(&self, other: &Plane<U>, f: impl Fn(T, U) -> V) -> Result<Plane<V>> {
        ensure_same_dims(self.dims(), other.dims())?;
        Ok(Plane {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Circular shift: `out[(r + dr, c + dc) mod dims] = self[r, c]`.
    pub fn circshift(&self, dr: isize, dc: isize) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.get_wrapped(r as isize - dr, c as isize - dc))
    }
}

impl RealPlane {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| v * k)
    }

    /// Returns `a . self + b . other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |x, y| x * y)
    }

    pub fn to_complex(&self) -> ComplexPlane {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

impl ComplexPlane {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, Complex64::new(0.0, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| v * k)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn re(&self) -> RealPlane {
        self.map(|v| v.re)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.zip_map(other, |x, y| x * a + y * b)
    }

    /// Largest element-wise distance between two spectra of equal dims.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("dims mismatch: {}x{} vs {}x{}", a.0, a.1, b.0, b.1)));
    }
    Ok(())
}

/// Wrapped signed offset of index `i` on an axis of length `n`, in
/// `[-n/2, n/2)` for even `n` and `[-(n-1)/2, (n-1)/2]` for odd `n`.
#[inline]
pub fn signed_offset(i: usize, n: usize) -> isize {
    if 2 * i < n {
        i as isize
    } else {
        i as isize - n as isize
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_axis(buf: &mut [Complex64], len: usize, direction: FftDirection) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction));
    fft.process(buf);
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

fn transform(p: &ComplexPlane, direction: FftDirection) -> ComplexPlane {
    let (rows, cols) = p.dims();
    let mut buf = p.data.clone();
    fft_axis(&mut buf, cols, direction);
    let mut t = transpose(&buf, rows, cols);
    fft_axis(&mut t, rows, direction);
    let mut out = transpose(&t, cols, rows);
    let k = 1.0 / ((rows * cols) as f64).sqrt();
    for v in &mut out {
        *v *= k;
    }
    ComplexPlane { rows, cols, data: out }
}

/// Unitary forward 2-D DFT of a real plane.
pub fn dft2(p: &RealPlane) -> Result<ComplexPlane> {
    if !p.is_finite() {
        return Err(Error::invalid("dft2 input contains non-finite values"));
    }
    Ok(transform(&p.to_complex(), FftDirection::Forward))
}

/// Unitary forward 2-D DFT of a complex plane.
pub fn dft2_complex(p: &ComplexPlane) -> Result<ComplexPlane> {
    if !p.is_finite() {
        return Err(Error::invalid("dft2 input contains non-finite values"));
    }
    Ok(transform(p, FftDirection::Forward))
}

/// Unitary inverse 2-D DFT.
pub fn idft2(s: &ComplexPlane) -> Result<ComplexPlane> {
    if !s.is_finite() {
        return Err(Error::invalid("idft2 input contains non-finite values"));
    }
    Ok(transform(s, FftDirection::Inverse))
}

/// Inverse transform of a spectrum known to be conjugate-symmetric; the
/// imaginary residue is dropped.
pub fn idft2_real(s: &ComplexPlane) -> Result<RealPlane> {
    Ok(idft2(s)?.re())
}

/// Spectrum of the circular convolution `x * w` given unitary spectra of both.
pub fn convolution_spectrum(x_hat: &ComplexPlane, w_hat: &ComplexPlane) -> Result<ComplexPlane> {
    let gain = (x_hat.len() as f64).sqrt();
    x_hat.zip_map(w_hat, |a, b| a * b * gain)
}

/// Spectrum of `circular_correlate(x, w)` given unitary spectra of both.
pub fn correlation_spectrum(x_hat: &ComplexPlane, w_hat: &ComplexPlane) -> Result<ComplexPlane> {
    let gain = (x_hat.len() as f64).sqrt();
    x_hat.zip_map(w_hat, |a, b| a.conj() * b * gain)
}

/// Direct O(M^2 N^2) circular cross-correlation,
/// `out[u] = sum_p x[p] . w[p + u]`.
pub fn circular_correlate(x: &RealPlane, w: &RealPlane) -> Result<RealPlane> {
    ensure_same_dims(x.dims(), w.dims())?;
    let (rows, cols) = x.dims();
    Ok(RealPlane::from_fn(rows, cols, |ur, uc| {
        let mut acc = 0.0;
        for pr in 0..rows {
            for pc in 0..cols {
                acc += x.get(pr, pc) * w.get((pr + ur) % rows, (pc + uc) % cols);
            }
        }
        acc
    }))
}

/// Direct O(M^2 N^2) circular convolution, `out[u] = sum_p x[p] . w[u - p]`.
pub fn circular_convolve(x: &RealPlane, w: &RealPlane) -> Result<RealPlane> {
    ensure_same_dims(x.dims(), w.dims())?;
    let (rows, cols) = x.dims();
    Ok(RealPlane::from_fn(rows, cols, |ur, uc| {
        let mut acc = 0.0;
        for pr in 0..rows {
            for pc in 0..cols {
                acc += x.get(pr, pc) * w.get((ur + rows - pr) % rows, (uc + cols - pc) % cols);
            }
        }
        acc
    }))
}

fn hann_1d(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let denom = (n - 1) as f64;
    (0..n).map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / denom).cos())).collect()
}

/// Separable Hann window laid out in patch coordinates (zero on the border).
pub fn hann_window(rows: usize, cols: usize) -> Result<RealPlane> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("hann window dims must be positive"));
    }
    let wr = hann_1d(rows);
    let wc = hann_1d(cols);
    Ok(RealPlane::from_fn(rows, cols, |r, c| wr[r] * wc[c]))
}

/// Periodic Gaussian with unit peak at the origin.
pub fn gaussian_label(rows: usize, cols: usize, sigma: f64) -> Result<RealPlane> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("label dims must be positive"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("label sigma must be positive, got {sigma}")));
    }
    let denom = 2.0 * sigma * sigma;
    Ok(RealPlane::from_fn(rows, cols, |r, c| {
        let dr = signed_offset(r, rows) as f64;
        let dc = signed_offset(c, cols) as f64;
        (-(dr * dr + dc * dc) / denom).exp()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RealPlane {
        RealPlane::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn impulse_transforms_to_constant() {
        let mut p = RealPlane::zeros(4, 4);
        p.set(0, 0, 1.0);
        let s = dft2(&p).unwrap();
        for v in s.as_slice() {
            assert!((v - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn zeros_transform_to_zeros() {
        let s = dft2(&RealPlane::zeros(5, 3)).unwrap();
        assert_eq!(s.norm_sq(), 0.0);
    }

    #[test]
    fn parseval_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_plane(&mut rng, 8, 8);
        let s = dft2(&p).unwrap();
        assert!((p.norm_sq() - s.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_plane(&mut rng, 8, 8);
        let back = idft2(&dft2(&p).unwrap()).unwrap();
        let err = back.re().lincomb(1.0, &p, -1.0).unwrap().max_abs();
        assert!(err < 1e-12);
        assert!(back.max_abs_imag() < 1e-12);
    }

    #[test]
    fn ones_spectrum_inverts_to_scaled_impulse() {
        let s = ComplexPlane::filled(4, 4, Complex64::new(1.0, 0.0));
        let p = idft2(&s).unwrap();
        assert!((p.get(0, 0).re - 4.0).abs() < 1e-12);
        for (i, v) in p.as_slice().iter().enumerate().skip(1) {
            assert!(v.norm() < 1e-12, "index {i}");
        }
    }

    #[test]
    fn non_finite_rejected() {
        let mut p = RealPlane::zeros(2, 2);
        p.set(1, 1, f64::NAN);
        assert!(matches!(dft2(&p), Err(Error::InvalidInput(_))));
        let mut s = ComplexPlane::zeros(2, 2);
        s.set(0, 1, Complex64::new(f64::INFINITY, 0.0));
        assert!(idft2(&s).is_err());
    }

    #[test]
    fn bad_dims_rejected() {
        assert!(RealPlane::new(0, 3, vec![]).is_err());
        assert!(RealPlane::new(2, 3, vec![0.0; 5]).is_err());
        let a = RealPlane::zeros(2, 3);
        let b = RealPlane::zeros(3, 2);
        assert!(circular_correlate(&a, &b).is_err());
    }

    #[test]
    fn correlate_with_origin_impulse_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_plane(&mut rng, 4, 4);
        let mut x = RealPlane::zeros(4, 4);
        x.set(0, 0, 1.0);
        assert_eq!(circular_correlate(&x, &w).unwrap(), w);
    }

    #[test]
    fn correlate_with_shifted_impulse_shifts_by_one_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = random_plane(&mut rng, 4, 4);
        let mut x = RealPlane::zeros(4, 4);
        x.set(1, 0, 1.0);
        let out = circular_correlate(&x, &w).unwrap();
        assert_eq!(out, w.circshift(-1, 0));
    }

    #[test]
    fn correlate_matches_spectral_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_plane(&mut rng, 6, 5);
        let w = random_plane(&mut rng, 6, 5);
        let direct = circular_correlate(&x, &w).unwrap();
        let spec = correlation_spectrum(&dft2(&x).unwrap(), &dft2(&w).unwrap()).unwrap();
        let via_fft = idft2_real(&spec).unwrap();
        assert!(direct.lincomb(1.0, &via_fft, -1.0).unwrap().max_abs() < 1e-10);

        let conv = circular_convolve(&x, &w).unwrap();
        let spec = convolution_spectrum(&dft2(&x).unwrap(), &dft2(&w).unwrap()).unwrap();
        assert!(conv.lincomb(1.0, &idft2_real(&spec).unwrap(), -1.0).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn hann_edge_cases() {
        assert_eq!(hann_window(1, 1).unwrap().get(0, 0), 1.0);
        let w4 = hann_window(4, 4).unwrap();
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(w4.get(r, c), 0.0);
        }
        let w5 = hann_window(5, 5).unwrap();
        assert!((w5.get(2, 2) - 1.0).abs() < 1e-15);
        assert!(w5.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn gaussian_label_values() {
        let y = gaussian_label(8, 8, 1.0).unwrap();
        assert_eq!(y.get(0, 0), 1.0);
        assert!((y.get(1, 0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((y.get(7, 0) - (-0.5f64).exp()).abs() < 1e-15);
        let wide = gaussian_label(8, 8, 1e6).unwrap();
        assert!(wide.as_slice().iter().all(|&v| (v - 1.0).abs() < 1e-9));
        assert!(gaussian_label(8, 8, 0.0).is_err());
        assert!(gaussian_label(8, 8, -1.0).is_err());
    }

    #[test]
    fn signed_offsets() {
        assert_eq!(signed_offset(0, 8), 0);
        assert_eq!(signed_offset(3, 8), 3);
        assert_eq!(signed_offset(4, 8), -4);
        assert_eq!(signed_offset(7, 8), -1);
        assert_eq!(signed_offset(2, 5), 2);
        assert_eq!(signed_offset(3, 5), -2);
    }
}
